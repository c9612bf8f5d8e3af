import numpy as np

from whitham_val import GglParams, Grid1D, SpectralField, wavetrain_from_q
from whitham_val.model import PolarState
from whitham_val.linear_analysis import (
    assemble_lambda_hat, build_split, center_eigenvalue_derivatives,
    classify_from_derivatives, fit_damping_bounds, lambda2_prime0,
    spectrum_curves, verify_semiderivative, w_nonlinearity,
)

params = GglParams()
wt = wavetrain_from_q(params, 0.0)
e2rho = wt.amplitude_sq()

# anchor at k = 0
sym0 = assemble_lambda_hat(0.0, params, wt)
ref = np.array([[-2 * e2rho, -2 * wt.q, params.gamma_r], [0, 0, 0], [0, 0, 0]])
print("matrix(0) dev:", np.max(np.abs(sym0.matrix - ref)))
print("eigs(0):", sym0.eigenvalues)

# eigenpair residual at k = 1
sym1 = assemble_lambda_hat(1.0, params, wt)
w_, v_ = np.linalg.eig(sym1.matrix)
for lam in sym1.eigenvalues:
    i = np.argmin(np.abs(w_ - lam))
    r = np.linalg.norm(sym1.matrix @ v_[:, i] - lam * v_[:, i])
    print(f"  eigpair residual at k=1: {r:.2e}")

# decoupled diagonal case
p0 = GglParams(alpha=0, beta=0, gamma_r=0, gamma_i=0, a=1.0, c=0, d=0)
wt0 = wavetrain_from_q(p0, 0.0)
s = assemble_lambda_hat(2.0, p0, wt0)
print("decoupled eigs at k=2 (expect -6,-4,-4):", np.sort(s.eigenvalues.real))

# curves
cur = spectrum_curves(params, wt, np.linspace(-10, 10, 401))
print("max Re over [-10,10]:", cur.max_real_part)
for kk in (5.0, 10.0):
    ev = assemble_lambda_hat(kk, params, wt).eigenvalues
    print(f"  k={kk}: max Re = {ev.real.max():.3f} vs -min(1,a)k^2/2 = {-0.5*kk**2:.1f}")

# split
split = build_split(params, wt)
print("delta_lambda:", split.delta_lambda, "gap:", split.gap)
pc0, ps0 = split.projectors(0.0)
expected_pc0 = np.array([
    [0, -wt.q / e2rho, 0.5 * params.gamma_r / e2rho],
    [0, 1, 0],
    [0, 0, 1],
])
print("P_c(0) dev:", np.max(np.abs(pc0 - expected_pc0)))
print("rank P_c(0):", np.linalg.matrix_rank(pc0))
print("P_c(0) @ (1,0,0):", np.max(np.abs(pc0 @ np.array([1.0, 0, 0]))))

# projector algebra at sampled k inside pure regions
for k in (0.1, 0.2, split.delta_lambda * 0.49, split.delta_lambda * 1.1, 3.0):
    pc, ps = split.projectors(k)
    idem = np.max(np.abs(pc @ pc - pc))
    comp = np.max(np.abs(pc + ps - np.eye(3)))
    print(f"  k={k:.3f}: |Pc^2-Pc|={idem:.2e} |Pc+Ps-I|={comp:.2e}")

# commutation property inside chi==1 region
k = split.delta_lambda * 0.4
pc, ps = split.projectors(k)
lam = assemble_lambda_hat(k, params, wt).matrix
cross = pc @ lam @ ps
print("cross term |Pc L Ps| at chi=1:", np.max(np.abs(cross)))

# semiderivative trials
g = Grid1D(512, 64 * np.pi)
rng = np.random.default_rng(7)
trials = []
for _ in range(10):
    x0 = rng.uniform(0, 64 * np.pi)
    s1, s2 = rng.uniform(2.0, 5.0, 2)
    a1, a2 = rng.uniform(0.01, 0.05, 2)
    xs = g.points
    def bump(x0, s):
        d = xs - x0
        d = np.minimum(np.abs(d), 64 * np.pi - np.abs(d))
        return np.exp(-d**2 / (2 * s**2))
    r = SpectralField.from_samples(g, a1 * bump(x0, s1))
    psi = SpectralField.from_samples(g, a2 * bump((x0 + 30) % (64 * np.pi), s2))
    b = SpectralField(g, np.zeros(g.num_modes, complex))
    trials.append(PolarState(r=r, psi=psi, B=b, time=0.0))
rep = verify_semiderivative(split, params, wt, trials)
print("semider slopes:", [f"{s:.3f}" for s in rep.slopes])
print("pc0_image_max:", rep.pc0_image_max, "passed:", rep.passed)

# lambda2'(0)
mat, cls = lambda2_prime0(params, wt)
print("lambda2'(0):", mat.tolist(), cls)
mu = center_eigenvalue_derivatives(params, wt)
print("FD mu:", mu, "eig(M):", np.linalg.eigvals(mat))
print("FD classification:", classify_from_derivatives(mu))

wt3 = wavetrain_from_q(params, 0.3)
mat3, cls3 = lambda2_prime0(params, wt3)
mu3 = center_eigenvalue_derivatives(params, wt3)
ev_exact = np.sort_complex(np.linalg.eigvals(mat3).astype(complex))
ev_fd = np.sort_complex(mu3)
print("q=0.3 exact:", ev_exact, "fd:", ev_fd,
      "rel err:", np.max(np.abs(ev_exact - ev_fd)) / np.max(np.abs(ev_exact)))

# damping fit
fit = fit_damping_bounds(params, wt, split)
print("damping fit:", fit.d0, fit.d1, fit.d2, fit.feasible, fit.max_violation)
