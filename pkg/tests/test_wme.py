"""Slow-system layer: fluxes, amplitude solve, classification, filtered solver."""

import math

import numpy as np
import pytest

from whitham_val import (
    GevreyParams,
    GglParams,
    Grid1D,
    NonPositiveAmplitude,
    SmallnessViolated,
    SpectralField,
    StripExhausted,
    gevrey_norm,
    wavetrain_from_q,
)
from whitham_val.spectral import pad_spectrum
from whitham_val.wme import (
    Classification,
    ModulationState,
    WmeConfig,
    classify_matrix,
    classify_wme,
    estimate_eta,
    solve_r0,
    wme_flux,
    wme_solve,
    wme_step,
)

P = GglParams()
G = Grid1D(64, 2 * np.pi)


def const_field(value):
    c = np.zeros(G.num_modes, complex)
    c[0] = value
    return SpectralField(G, c)


def state_from_samples(psis, bs, sigma, grid=G):
    return ModulationState(
        psi_check=SpectralField.from_samples(grid, psis),
        B_check=SpectralField.from_samples(grid, bs),
        sigma_current=sigma,
    )


ELLIPTIC = GglParams(
    alpha=0.0, beta=0.0, gamma_r=0.0, gamma_i=-0.5, a=1.0, c=0.0, d=-1.0
)


def elliptic_eigvector_state(amp=1e-6, sigma=0.5):
    """Initial data on the growing eigenvector of the k = 1 linearization."""
    wt = wavetrain_from_q(ELLIPTIC, 0.3)
    M = np.array([[0.0, ELLIPTIC.gamma_i], [-2.0 * ELLIPTIC.d * wt.q, 0.0]])
    lam, vecs = np.linalg.eig(1j * M)
    v = vecs[:, int(np.argmax(lam.real))]
    ph = np.zeros(G.num_modes, complex)
    bh = np.zeros(G.num_modes, complex)
    ph[1], ph[-1] = amp * v[0], np.conj(amp * v[0])
    bh[1], bh[-1] = amp * v[1], np.conj(amp * v[1])
    state = ModulationState(
        psi_check=SpectralField(G, ph), B_check=SpectralField(G, bh),
        sigma_current=sigma,
    )
    return state, wt, float(np.max(lam.real))


def test_flux_zero_state():
    wt = wavetrain_from_q(P, 0.0)
    assert wme_flux(0.0, 0.0, P, wt) == (0.0, 0.0)


def test_flux_scalar_q_zero():
    wt = wavetrain_from_q(P, 0.0)
    psi, B = 0.3, -0.2
    f1, f2 = wme_flux(psi, B, P, wt)
    assert math.isclose(
        f1, (P.beta - P.alpha) * psi**2 + (P.gamma_i - P.beta * P.gamma_r) * B,
        rel_tol=1e-15,
    )
    assert math.isclose(
        f2, -P.d * psi**2 + (P.c + P.d * P.gamma_r) * B, rel_tol=1e-15
    )


def test_flux_field_matches_scalar_on_constants():
    wt = wavetrain_from_q(P, 0.25)
    s1, s2 = wme_flux(0.07, -0.04, P, wt)
    F1, F2 = wme_flux(const_field(0.07), const_field(-0.04), P, wt)
    assert abs(F1.c[0] - s1) < 1e-15
    assert abs(F2.c[0] - s2) < 1e-15
    assert np.max(np.abs(F1.c[1:])) == 0.0
    assert np.max(np.abs(F2.c[1:])) == 0.0


def test_flux_field_is_dealiased():
    # psi with only mode 22: psi^2 would alias to mode -20 on a 64-mode grid
    wt = wavetrain_from_q(P, 0.0)
    c = np.zeros(64, complex)
    c[22] = 0.1
    c[-22] = 0.1
    F1, _ = wme_flux(SpectralField(G, c), const_field(0.0), P, wt)
    # only the k=0 self-interaction survives; the aliased +-44 -> -+20 images must not
    assert abs(F1.c[20]) < 1e-16
    assert abs(F1.c[-20]) < 1e-16


def test_solve_r0_zero():
    wt = wavetrain_from_q(P, 0.25)
    r = solve_r0(const_field(0.0), const_field(0.0), P, wt)
    assert np.max(np.abs(r.c)) == 0.0


def test_solve_r0_constant_closed_form():
    # q=0, rho=0, B=0.1: e^{2r} = 1 + 0.4*0.1 -> r = ln(1.04)/2
    wt = wavetrain_from_q(P, 0.0)
    r = solve_r0(const_field(0.0), const_field(0.1), P, wt)
    assert abs(r.c[0].real - 0.5 * math.log(1.04)) < 1e-15
    assert np.max(np.abs(r.c[1:])) < 1e-16


def test_solve_r0_backsubstitution_residual():
    wt = wavetrain_from_q(P, 0.25)
    rng = np.random.default_rng(2)
    psis = 0.05 * np.sin(G.points) + 0.02 * rng.standard_normal(1) * np.cos(2 * G.points)
    bs = 0.05 * np.cos(G.points)
    psi = SpectralField.from_samples(G, psis)
    B = SpectralField.from_samples(G, bs)
    r = solve_r0(psi, B, P, wt)
    lhs = np.exp(2.0 * np.real(r.samples()))
    rhs = 1.0 + math.exp(-2.0 * wt.rho) * (
        -2.0 * wt.q * psis - psis**2 + P.gamma_r * bs
    )
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_solve_r0_nonpositive_amplitude():
    wt = wavetrain_from_q(P, 0.0)
    with pytest.raises(NonPositiveAmplitude):
        solve_r0(const_field(2.0), const_field(0.0), P, wt)


def test_classify_default_set_hyperbolic():
    wt = wavetrain_from_q(P, 0.0)
    assert classify_wme(P, wt, 0.0) is Classification.HYPERBOLIC


def test_classify_triangular_distinct():
    # d = 0, gamma_i = beta gamma_r: triangular with distinct real eigenvalues
    p = GglParams(alpha=0.5, beta=0.2, gamma_r=0.4, gamma_i=0.08, a=1.0, c=0.1, d=0.0)
    wt = wavetrain_from_q(p, 0.25)
    assert classify_wme(p, wt, 0.0) is Classification.HYPERBOLIC


def test_classify_nilpotent_degenerate():
    p = GglParams(alpha=0.3, beta=0.3, gamma_r=0.0, gamma_i=1.0, a=1.0, c=0.0, d=1.0)
    wt = wavetrain_from_q(p, 0.0)
    # M = [[0, 1], [0, 0]]
    assert classify_wme(p, wt, 0.0) is Classification.DEGENERATE


def test_classify_off_diagonal_signs():
    # alpha=beta=0, c=0, gamma_r=0, d=1, q+psi=0.5: M = [[0, gamma_i], [-1, 0]]
    wt = wavetrain_from_q(GglParams(d=1.0), 0.5)
    p_pos = GglParams(alpha=0.0, beta=0.0, gamma_r=0.0, gamma_i=1.0, a=1.0, c=0.0, d=1.0)
    p_neg = GglParams(alpha=0.0, beta=0.0, gamma_r=0.0, gamma_i=-1.0, a=1.0, c=0.0, d=1.0)
    assert classify_wme(p_pos, wt, 0.0) is Classification.ELLIPTIC
    assert classify_wme(p_neg, wt, 0.0) is Classification.HYPERBOLIC


def test_classify_matches_eigenvalue_oracle_random():
    rng = np.random.default_rng(12)
    for _ in range(50):
        M = rng.uniform(-1, 1, size=(2, 2))
        got = classify_matrix(M)
        lam = np.linalg.eigvals(M)
        scale = max(1e-300, float(np.max(np.abs(lam))))
        if np.max(np.abs(lam.imag)) / scale > 1e-6:
            assert got is Classification.ELLIPTIC
        elif abs(lam[0] - lam[1]) / scale > 1e-6:
            assert got is Classification.HYPERBOLIC


def test_estimate_eta_zero_matrix():
    # all matrix entries vanish: alpha=beta, gamma_i=beta*gamma_r, d=0, c=0
    p = GglParams(alpha=0.2, beta=0.2, gamma_r=0.5, gamma_i=0.1, a=1.0, c=0.0, d=0.0)
    wt = wavetrain_from_q(p, 0.0)
    st = state_from_samples(np.zeros(64), np.zeros(64), 0.5)
    assert estimate_eta(st, p, wt, 1.0) == 1.0
    assert estimate_eta(st, p, wt, 3.0) == 1.0


def test_estimate_eta_default_set_value():
    # M(0) = [[0, 0.22], [0, 0.18]]: radius 0.18, no imaginary part
    wt = wavetrain_from_q(P, 0.0)
    st = state_from_samples(np.zeros(64), np.zeros(64), 0.5)
    assert abs(estimate_eta(st, P, wt, 2.0) - 1.36) < 1e-12
    assert estimate_eta(st, P, wt, 3.0) > estimate_eta(st, P, wt, 2.0)
    with pytest.raises(ValueError):
        estimate_eta(st, P, wt, 0.5)


def test_wme_step_zero_state_fixed():
    wt = wavetrain_from_q(P, 0.0)
    st = state_from_samples(np.zeros(64), np.zeros(64), 0.5)
    cfg = WmeConfig(eta=1.0, sigma0=0.5, dt=2e-3)
    out = wme_step(st, P, wt, cfg)
    assert np.max(np.abs(out.stacked())) == 0.0
    assert out.T == 2e-3
    assert abs(out.sigma_current - (0.5 - 2e-3)) < 1e-15


def test_wme_step_constants_are_equilibria():
    wt = wavetrain_from_q(P, 0.25)
    st = ModulationState(
        psi_check=const_field(0.07), B_check=const_field(-0.03), sigma_current=0.5
    )
    cfg = WmeConfig(eta=1.0, sigma0=0.5, dt=2e-3)
    out = wme_step(st, P, wt, cfg)
    assert out.psi_check.c[0] == 0.07
    assert out.B_check.c[0] == -0.03
    assert np.max(np.abs(out.psi_check.c[1:])) == 0.0
    assert np.max(np.abs(out.B_check.c[1:])) == 0.0


def test_wme_step_strip_exhaustion():
    wt = wavetrain_from_q(P, 0.0)
    st = state_from_samples(np.zeros(64), np.zeros(64), 1e-4)
    with pytest.raises(StripExhausted):
        wme_step(st, P, wt, WmeConfig(eta=1.0, sigma0=0.5, dt=2e-3))


def test_wme_step_cfl_guard():
    wt = wavetrain_from_q(P, 0.0)
    st = state_from_samples(0.01 * np.sin(G.points), np.zeros(64), 0.5)
    with pytest.raises(ValueError):
        wme_step(st, P, wt, WmeConfig(eta=0.0, sigma0=0.5, dt=5.0))


def test_wme_solve_zero_and_constant():
    wt = wavetrain_from_q(P, 0.0)
    cfg = WmeConfig(eta=1e-4, sigma0=0.5, dt=2e-3)
    zero = state_from_samples(np.zeros(64), np.zeros(64), 0.5)
    out = wme_solve(zero, P, wt, cfg, 0.3)[-1]
    assert np.max(np.abs(out.stacked())) == 0.0
    const = ModulationState(
        psi_check=const_field(0.05), B_check=const_field(0.02), sigma_current=0.5
    )
    out = wme_solve(const, P, wt, cfg, 0.3)[-1]
    assert out.psi_check.c[0] == 0.05
    assert out.B_check.c[0] == 0.02


def test_wme_solve_smooth_run_monitor_and_means():
    wt = wavetrain_from_q(P, 0.0)
    cfg = WmeConfig(eta=1e-4, sigma0=0.25, dt=2e-3)
    st = state_from_samples(0.05 * np.sin(G.points), 0.05 * np.cos(G.points), 0.25)
    sol = wme_solve(st, P, wt, cfg, 0.5, sample_times=[0.1, 0.25, 0.5])
    assert [s.T for s in sol] == [0.1, 0.25, 0.5]
    # unfiltered means conserved exactly (k = 0 filter exemption)
    assert abs(sol[-1].psi_check.c[0] - st.psi_check.c[0]) < 1e-13
    assert abs(sol[-1].B_check.c[0] - st.B_check.c[0]) < 1e-13
    # monitored norm nonincreasing up to the documented factor
    norms = [
        gevrey_norm(
            SpectralField(G, s.stacked()), GevreyParams(s.sigma_current, cfg.m + 1.0)
        )
        for s in [st] + sol
    ]
    for a, b in zip(norms, norms[1:]):
        assert b <= 1.1 * a


def test_wme_solve_smallness_violation():
    wt = wavetrain_from_q(P, 0.0)
    cfg = WmeConfig(eta=1e-4, sigma0=0.5, dt=2e-3)
    st = state_from_samples(0.5 * np.sin(G.points), np.zeros(64), 0.5)
    with pytest.raises(SmallnessViolated):
        wme_solve(st, P, wt, cfg, 0.1)


def test_wme_solve_budget_check():
    wt = wavetrain_from_q(P, 0.0)
    st = state_from_samples(np.zeros(64), np.zeros(64), 0.5)
    with pytest.raises(StripExhausted):
        wme_solve(st, P, wt, WmeConfig(eta=1.0, sigma0=0.5, dt=2e-3), 0.6)


def test_wme_solve_refinement_consistency():
    wt = wavetrain_from_q(P, 0.0)
    st = state_from_samples(0.05 * np.sin(G.points), 0.05 * np.cos(G.points), 0.25)
    coarse = wme_solve(st, P, wt, WmeConfig(eta=1e-4, sigma0=0.25, dt=2e-3), 0.5)[-1]
    g2 = Grid1D(128, 2 * np.pi)
    st2 = state_from_samples(
        0.05 * np.sin(g2.points), 0.05 * np.cos(g2.points), 0.25, grid=g2
    )
    fine = wme_solve(st2, P, wt, WmeConfig(eta=1e-4, sigma0=0.25, dt=1e-3), 0.5)[-1]
    cpad = pad_spectrum(coarse.stacked(), 64, 128)
    rel = np.linalg.norm(cpad - fine.stacked()) / np.linalg.norm(fine.stacked())
    assert rel < 1e-6


def test_elliptic_unfiltered_growth_rate():
    # eta = 0: single growing mode, rate |Im lambda| * |k| with k = 1
    st, wt, rate_pred = elliptic_eigvector_state()
    cfg = WmeConfig(eta=0.0, sigma0=0.5, dt=2e-3)
    sol = wme_solve(st, ELLIPTIC, wt, cfg, 0.1, sample_times=[0.05, 0.1])
    n1 = np.linalg.norm(sol[0].stacked())
    n2 = np.linalg.norm(sol[1].stacked())
    rate = math.log(n2 / n1) / 0.05
    assert abs(rate - rate_pred) / rate_pred < 0.1


def test_elliptic_filtered_mode_contraction():
    # with eta from estimate_eta each step contracts the mode magnitude by at
    # least the closed-form factor e^{(|Im lambda| - 2 eta) dt}
    st, wt, rate_pred = elliptic_eigvector_state()
    eta = estimate_eta(st, ELLIPTIC, wt, 2.0)
    cfg = WmeConfig(eta=eta, sigma0=0.5, dt=2e-3)
    bound = math.exp((rate_pred - 2.0 * eta) * cfg.dt)
    s = st
    prev = abs(s.psi_check.c[1])
    for _ in range(20):
        s = wme_step(s, ELLIPTIC, wt, cfg)
        cur = abs(s.psi_check.c[1])
        assert cur <= prev * bound * (1.0 + 1e-10)
        prev = cur


def test_elliptic_filtered_norm_nonincreasing():
    st, wt, _ = elliptic_eigvector_state()
    cfg = WmeConfig(eta=None, sigma0=0.5, dt=2e-3)  # resolved via estimate_eta
    sol = wme_solve(st, ELLIPTIC, wt, cfg, 0.1, sample_times=[0.02, 0.05, 0.1])
    norms = [
        gevrey_norm(
            SpectralField(G, s.stacked()), GevreyParams(s.sigma_current, cfg.m + 1.0)
        )
        for s in [st] + sol
    ]
    assert all(b <= a * (1.0 + 1e-12) for a, b in zip(norms, norms[1:]))


def test_modulation_state_validation():
    with pytest.raises(ValueError):
        ModulationState(
            psi_check=const_field(0.0),
            B_check=SpectralField(Grid1D(64, 4 * np.pi), np.zeros(64, complex)),
            sigma_current=0.5,
        )
    bad_grid = Grid1D(64, 4 * np.pi)
    with pytest.raises(ValueError):
        ModulationState(
            psi_check=SpectralField(bad_grid, np.zeros(64, complex)),
            B_check=SpectralField(bad_grid, np.zeros(64, complex)),
            sigma_current=0.5,
        )
    with pytest.raises(ValueError):
        ModulationState(
            psi_check=const_field(0.0), B_check=const_field(0.0),
            T=-1.0, sigma_current=0.5,
        )


def test_wme_config_validation():
    with pytest.raises(ValueError):
        WmeConfig(eta=-1.0)
    with pytest.raises(ValueError):
        WmeConfig(sigma0=0.0)
    with pytest.raises(ValueError):
        WmeConfig(dt=-1e-3)
    with pytest.raises(ValueError):
        WmeConfig(smallness_bound=0.0)
