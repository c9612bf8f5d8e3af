import numpy as np

from whitham_val import (
    GevreyParams, GglParams, Grid1D, ModulationState, SpectralField, WmeConfig,
    wavetrain_from_q,
)
from whitham_val.correctors import (
    assemble_ansatz, corrector1_r, corrector1_solve, evaluate_scaled_residual,
    lift_to_ab, residuals_scaled, solve_hierarchy, time_derivative_r0,
)
from whitham_val.wme import solve_r0, wme_solve

params = GglParams()
wt = wavetrain_from_q(params, 0.0)
g = Grid1D(64, 2 * np.pi)
X = g.points
amp = 0.02
psi0 = SpectralField.from_samples(g, amp * np.sin(X))
b0 = SpectralField.from_samples(g, amp * np.cos(X))
init = ModulationState(psi_check=psi0, B_check=b0, sigma_current=0.5)
cfg = WmeConfig(eta=1e-4, sigma0=0.5, dt=2e-3)

# 1. time_derivative_r0 FD oracle
dt = 1e-4
traj = wme_solve(init, params, wt, WmeConfig(eta=0.0, sigma0=0.5, dt=dt), dt, [dt])
r0a = solve_r0(init.psi_check, init.B_check, params, wt)
r0b = solve_r0(traj[0].psi_check, traj[0].B_check, params, wt)
fd = (r0b.c - r0a.c) / dt
an = time_derivative_r0(init, params, wt).c
rel = np.max(np.abs(fd - an)) / np.max(np.abs(an))
print("dT r0 FD rel err:", rel)

# 2. hierarchy solve, both orders
T1 = 0.5
times = list(np.linspace(0.0, T1, 26))
h1 = solve_hierarchy(init, params, wt, cfg, 0.1, 1, T1, times)
h0 = solve_hierarchy(init, params, wt, cfg, 0.1, 0, T1, times)
print("corr psi1 final max:", np.max(np.abs(h1.corrector[-1].psi1.samples())))

# base trajectories agree between joint solve and plain wme_solve
plain = wme_solve(init, params, wt, cfg, T1, times)
dev = max(
    np.max(np.abs(a.psi_check.c - b.psi_check.c)) for a, b in zip(plain, h1.base)
)
print("joint-vs-plain base dev:", dev)

# 3. residual orders
norm = GevreyParams(0.25, 2.0)
for order, h in ((0, h0), (1, h1)):
    norms = []
    for eps in (0.1, 0.05, 0.025):
        he = h.with_epsilon(eps)
        vals = [residuals_scaled(he, T, norm).res_u_norm for T in times]
        rvals = [residuals_scaled(he, T, norm).res_r_norm for T in times]
        norms.append((eps, max(vals), max(rvals)))
    (e1, u1, r1), (e2, u2, r2), (e3, u3, r3) = norms
    su = np.polyfit(np.log([e1, e2, e3]), np.log([u1, u2, u3]), 1)[0]
    sr = np.polyfit(np.log([e1, e2, e3]), np.log([r1, r2, r3]), 1)[0]
    print(f"order {order}: res_u {u1:.3e}/{u2:.3e}/{u3:.3e} slope {su:.3f}; "
          f"res_r slope {sr:.3f} (r vals {r1:.2e},{r3:.2e})")

# 4. Cauchy contour: first Taylor coefficient of the order-1 residual in eps
M, rho_c = 8, 0.05
T = times[13]
thetas = 2 * np.pi * np.arange(M) / M
c1 = [np.zeros(g.num_modes, complex) for _ in range(3)]
scale = [0.0, 0.0, 0.0]
for th in thetas:
    eps_c = rho_c * np.exp(1j * th)
    res = evaluate_scaled_residual(h1, T, eps_c)
    for k in range(3):
        c1[k] += res[k] * np.exp(-1j * th) / (M * rho_c)
        scale[k] = max(scale[k], np.max(np.abs(res[k])))
for k, name in enumerate(("res_r", "res_psi", "res_B")):
    print(f"c1[{name}] = {np.max(np.abs(c1[k])):.3e} (scale {scale[k]:.3e})")

# order-0: c1 of res_r should NOT vanish
c1r0 = np.zeros(g.num_modes, complex)
for th in thetas:
    eps_c = rho_c * np.exp(1j * th)
    res = evaluate_scaled_residual(h0, T, eps_c)
    c1r0 += res[0] * np.exp(-1j * th) / (M * rho_c)
print("order-0 c1[res_r]:", np.max(np.abs(c1r0)))

# 5. corrector linearity: frozen base, doubled forcing
b1, c1tr = corrector1_solve(init, params, wt, cfg, 0.2, [0.2], freeze_base=True)
b2, c2tr = corrector1_solve(init, params, wt, cfg, 0.2, [0.2],
                            freeze_base=True, forcing_scale=2.0)
dd = np.max(np.abs(c2tr[0].psi1.c - 2 * c1tr[0].psi1.c))
print("frozen-base doubling defect:", dd)

# zero base -> zero corrector
zf = SpectralField(g, np.zeros(g.num_modes, complex))
zinit = ModulationState(psi_check=zf, B_check=zf.copy(), sigma_current=0.5)
_, cz = corrector1_solve(zinit, params, wt, cfg, 0.2, [0.2])
print("zero-base corrector max:", np.max(np.abs(cz[0].stacked())))

# 6. ansatz + lift roundtrip
eps = 0.1
hfine = h1.with_epsilon(eps)
nf = int(64 / eps)
fine = Grid1D(nf, 2 * np.pi / eps)
pol = assemble_ansatz(hfine, fine, 0.0)
print("ansatz psi mean:", abs(pol.psi.c[0]))
ab = lift_to_ab(pol, wt, fine)
from whitham_val.model import extract_polar
back = extract_polar(ab, wt)
for nm in ("r", "psi", "B"):
    d = np.max(np.abs(getattr(back, nm).c - getattr(pol, nm).c))
    print(f"roundtrip {nm} dev: {d:.3e}")

# interpolation between samples: exact at sample, smooth nearby
mid_t = (times[3] + 0.3 * (times[4] - times[3])) / eps
pol_mid = assemble_ansatz(hfine, fine, mid_t)
print("mid-sample assembly ok, |psi|max:", np.max(np.abs(pol_mid.psi.samples())))
