"""The five validation experiments.

Each ``run_*`` function takes a validated :class:`ExperimentConfig` and
returns a :class:`RunReport` whose records carry every number the pass
verdict depends on. Failures of individual work units (one epsilon, one
wavenumber) are caught and recorded as structured error entries; the run
continues with the remaining units and the verdict is False. Failures of
the configured setting itself (an unstable parameter set, a non-hyperbolic
long-wave matrix) raise, because no experiment output would mean anything.

Determinism: all randomness flows from ``config.rng_seed`` and thread-level
parallelism only distributes the per-epsilon loop, whose outputs are joined
back in configuration order. Identical config and seed give identical
curves.
"""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import ExperimentConfig, initial_state
from .correctors import assemble_ansatz, lift_to_ab, residuals_scaled, solve_hierarchy
from .errors import (
    BlowUp,
    ConfigError,
    NoGap,
    NoWaveTrain,
    PeriodMismatch,
    PhaseSingularity,
    SmallnessViolated,
    StripExhausted,
)
from .linear_analysis import (
    build_split,
    center_eigenvalue_derivatives,
    classify_from_derivatives,
    fit_damping_bounds,
    lambda2_prime0,
    spectrum_curves,
    verify_semiderivative,
)
from .model import (
    GglParams,
    PolarState,
    WaveTrain,
    extract_polar,
    simulate,
    wavetrain_field,
    wavetrain_from_q,
)
from .report import CurveRow, RunReport, fit_loglog_slope
from .spectral import GevreyParams, Grid1D, SpectralField
from .wme import Classification

STABILITY_TOL = 1e-8
INVARIANCE_TOL = 1e-8
TINY_ERROR = 1e-8
SLOPE_MIN = 0.5 - 0.15
RESIDUAL_SLOPE_HALF_WIDTH = 0.3
SEMI_SLOPE_MIN = 0.9

_CLASS_CODE = {
    Classification.HYPERBOLIC: 0,
    Classification.ELLIPTIC: 1,
    Classification.DEGENERATE: 2,
}


def _error_entry(exc: Exception, **extra) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    out.update(extra)
    return out


def _next_power_of_two(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def fine_mode_count(cfg: ExperimentConfig, epsilon: float) -> int:
    """Fast-grid resolution for one epsilon: the configured mode density per
    unit 1/epsilon, rounded up to the next power of two."""
    raw = cfg.fine_modes_per_inverse_epsilon / epsilon
    return _next_power_of_two(math.ceil(raw - 1e-9))


def _map_units(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------------------
# wave-train invariance


def run_wavetrain_invariance(
    cfg: ExperimentConfig, threads: int = 1, q_values=(0.0, 0.25, 0.5)
) -> RunReport:
    """Evolve exact wave trains and record the sup deviation of (|A|, B).

    A wavenumber the torus cannot carry is recorded as a structured
    PeriodMismatch entry and the run continues with the remaining ones.
    """
    grid = Grid1D(512, 8.0 * np.pi)
    t_samples = np.linspace(0.0, 10.0, 21)
    records = []
    curves = []

    def one(q: float) -> dict:
        start = time.perf_counter()
        rec = {"q": q, "modes": grid.num_modes, "period": grid.period}
        try:
            wt = wavetrain_from_q(cfg.params, q)
            states = simulate(
                wavetrain_field(wt, grid),
                cfg.params,
                t_end=float(t_samples[-1]),
                dt=cfg.fast_dt,
                sample_times=t_samples,
            )
            amp = math.sqrt(wt.amplitude_sq())
            devs = []
            for t, st in zip(t_samples, states):
                dev_a = float(np.max(np.abs(np.abs(st.A.samples()) - amp)))
                dev_b = float(np.max(np.abs(st.B.samples())))
                devs.append((float(t), max(dev_a, dev_b)))
            rec["deviations"] = devs
            rec["max_deviation"] = max(d for _, d in devs)
            rec["error"] = None
        except (PeriodMismatch, NoWaveTrain, BlowUp) as exc:
            rec["error"] = _error_entry(exc, q=q)
        rec["runtime_s"] = time.perf_counter() - start
        return rec

    records = _map_units(one, list(q_values), threads)
    for rec in records:
        if rec["error"] is None:
            for t, dev in rec["deviations"]:
                curves.append(
                    CurveRow("wavetrain-invariance", rec["q"], t, dev, "sup_deviation")
                )
    clean = [r for r in records if r["error"] is None]
    worst = max((r["max_deviation"] for r in clean), default=math.inf)
    passed = len(clean) == len(records) and worst < INVARIANCE_TOL
    return RunReport(
        experiment="wavetrain-invariance",
        config=cfg.to_dict(),
        records=records,
        summary={
            "q_values": list(q_values),
            "max_deviation": worst,
            "tolerance": INVARIANCE_TOL,
            "t_end": float(t_samples[-1]),
        },
        passed=passed,
        curves=curves,
    )


# ---------------------------------------------------------------------------
# residual order


def run_residual_order(cfg: ExperimentConfig, threads: int = 1) -> RunReport:
    """Scaled-residual norms of the order-0 and order-1 approximations over a
    decreasing epsilon ladder, with fitted decay slopes.

    The slow solve is epsilon-independent, so each order is integrated once
    and re-weighted per epsilon.
    """
    del threads  # two cheap solves cover every epsilon
    wt = wavetrain_from_q(cfg.params, cfg.q)
    initial = initial_state(cfg)
    sample_T = np.linspace(0.0, cfg.T1, 5)
    norm_spec = GevreyParams(0.5 * cfg.wme.sigma0, cfg.wme.m)
    records = []
    curves = []
    combined = {}
    for order in (0, 1):
        start = time.perf_counter()
        h = solve_hierarchy(
            initial, cfg.params, wt, cfg.wme, cfg.epsilons[0], order, cfg.T1, sample_T
        )
        sup_by_eps = []
        for eps in cfg.epsilons:
            he = h.with_epsilon(eps)
            reports = [residuals_scaled(he, T, norm_spec) for T in h.times]
            sup_r = max(rep.res_r_norm for rep in reports)
            sup_u = max(rep.res_u_norm for rep in reports)
            sup_by_eps.append(max(sup_r, sup_u))
            records.append(
                {
                    "order": order,
                    "epsilon": eps,
                    "res_r_norm": sup_r,
                    "res_u_norm": sup_u,
                    "sample_T": [float(T) for T in h.times],
                }
            )
            curves.append(CurveRow("residual-order", eps, order, sup_u, "res_u_norm"))
            curves.append(CurveRow("residual-order", eps, order, sup_r, "res_r_norm"))
        fit = fit_loglog_slope(cfg.epsilons, sup_by_eps)
        combined[order] = {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "runtime_s": time.perf_counter() - start,
        }
    bands = {
        0: (1.0 - RESIDUAL_SLOPE_HALF_WIDTH, 1.0 + RESIDUAL_SLOPE_HALF_WIDTH),
        1: (2.0 - RESIDUAL_SLOPE_HALF_WIDTH, 2.0 + RESIDUAL_SLOPE_HALF_WIDTH),
    }
    passed = all(
        bands[n][0] <= combined[n]["slope"] <= bands[n][1] for n in (0, 1)
    )
    return RunReport(
        experiment="residual-order",
        config=cfg.to_dict(),
        records=records,
        summary={
            "fits": {str(n): combined[n] for n in combined},
            "slope_bands": {str(n): list(bands[n]) for n in bands},
            "norm_sigma": norm_spec.sigma,
            "norm_m": norm_spec.m,
        },
        passed=passed,
        curves=curves,
    )


# ---------------------------------------------------------------------------
# error scaling


def _revalidate_setting(params: GglParams, wt: WaveTrain) -> dict:
    """The error-scaling experiment only means something on a spectrally
    stable, hyperbolic setting; re-check both at runtime."""
    ks = np.linspace(-10.0, 10.0, 401)
    curves = spectrum_curves(params, wt, ks)
    if curves.max_real_part > STABILITY_TOL:
        raise ConfigError(
            f"parameter set is not spectrally stable: max Re lambda = "
            f"{curves.max_real_part:.3e}"
        )
    _, cls = lambda2_prime0(params, wt)
    if cls is not Classification.HYPERBOLIC:
        raise ConfigError(f"long-wave matrix is {cls.value}, need hyperbolic")
    return {"max_re_lambda": curves.max_real_part, "classification": cls.value}


def _polar_gap(a: PolarState, b: PolarState) -> float:
    parts = []
    for fa, fb in ((a.r, b.r), (a.psi, b.psi), (a.B, b.B)):
        da = np.real(fa.samples()) - np.real(fb.samples())
        parts.append(float(np.max(np.abs(da))))
    return max(parts)


def run_error_scaling(cfg: ExperimentConfig, threads: int = 1) -> RunReport:
    """Sup-norm gap between the simulated system and the assembled ansatz
    over [0, T1/epsilon], fitted against epsilon.

    The slow hierarchy is solved once (it does not know epsilon) and the
    horizon is halved up to three times if the analyticity strip or the
    smallness bound gives out; every halving is recorded.
    """
    wt = wavetrain_from_q(cfg.params, cfg.q)
    setting = _revalidate_setting(cfg.params, wt)
    initial = initial_state(cfg)
    mean_psi = abs(complex(initial.psi_check.c[0]))
    if mean_psi > 1e-12:
        raise ConfigError(f"initial psi mean {mean_psi:.3e} must vanish")

    t1 = cfg.T1
    halvings = []
    while True:
        try:
            sample_T = np.linspace(0.0, t1, cfg.sample_count)
            h = solve_hierarchy(
                initial,
                cfg.params,
                wt,
                cfg.wme,
                cfg.epsilons[0],
                cfg.order,
                t1,
                sample_T,
            )
            break
        except (StripExhausted, SmallnessViolated) as exc:
            if len(halvings) >= 3:
                raise
            halvings.append(
                {
                    "reason": type(exc).__name__,
                    "T1_from": t1,
                    "T1_to": 0.5 * t1,
                    "at_T": float(getattr(exc, "time", math.nan)),
                }
            )
            t1 *= 0.5

    def one(eps: float) -> dict:
        start = time.perf_counter()
        he = h.with_epsilon(eps)
        n_fine = fine_mode_count(cfg, eps)
        fine = Grid1D(n_fine, 2.0 * np.pi / eps)
        rec = {"epsilon": eps, "fine_modes": n_fine, "t_end": t1 / eps}
        errors = []
        t_now = 0.0
        try:
            state = lift_to_ab(assemble_ansatz(he, fine, 0.0), wt)
            for T in h.times:
                t_now = float(T) / eps
                if t_now > state.time + 1e-12:
                    state = simulate(state, cfg.params, t_now, cfg.fast_dt)[-1]
                gap = _polar_gap(extract_polar(state, wt), assemble_ansatz(he, fine, t_now))
                errors.append((t_now, gap))
            rec["errors"] = errors
            rec["max_error"] = max(g for _, g in errors)
            rec["error"] = None
        except (BlowUp, PhaseSingularity) as exc:
            rec["errors"] = errors
            rec["max_error"] = math.nan
            rec["error"] = _error_entry(
                exc, epsilon=eps, t=float(getattr(exc, "time", t_now))
            )
        rec["runtime_s"] = time.perf_counter() - start
        return rec

    records = _map_units(one, list(cfg.epsilons), threads)
    curves = []
    for rec in records:
        for t, gap in rec["errors"]:
            curves.append(CurveRow("error-scaling", rec["epsilon"], t, gap, "sup_error"))

    clean = [r for r in records if r["error"] is None]
    maxima = [r["max_error"] for r in clean]
    tiny = bool(clean) and all(m < TINY_ERROR for m in maxima)
    fit = None
    monotone = None
    if not tiny and len(clean) >= 3 and all(m > 0.0 for m in maxima):
        fit = fit_loglog_slope([r["epsilon"] for r in clean], maxima)
    if not tiny:
        # epsilons decrease along the list, so errors must too
        monotone = all(later <= earlier for earlier, later in zip(maxima, maxima[1:]))
    t1_min = 0.5 * cfg.T1
    complete = len(clean) == len(records)
    if tiny:
        passed = complete and t1 >= t1_min
    else:
        passed = (
            complete
            and fit is not None
            and fit.slope >= SLOPE_MIN
            and bool(monotone)
            and t1 >= t1_min
        )
    summary = {
        "setting": setting,
        "order": cfg.order,
        "T1_requested": cfg.T1,
        "T1_used": t1,
        "T1_min": t1_min,
        "halvings": halvings,
        "max_errors": {f"{r['epsilon']:g}": r["max_error"] for r in records},
        "tiny_error_floor": TINY_ERROR,
        "all_below_floor": tiny,
        "monotone": monotone,
        "slope_min": SLOPE_MIN,
        "fit": dataclasses.asdict(fit) if fit is not None else None,
    }
    return RunReport(
        experiment="error-scaling",
        config=cfg.to_dict(),
        records=records,
        summary=summary,
        passed=passed,
        curves=curves,
    )


# ---------------------------------------------------------------------------
# spectral report


def gaussian_bump_trials(count: int, seed: int) -> list:
    """Random pairs of nearly co-located Gaussian bumps on a long torus.

    Widely separated bumps would make the cross-product spectra oscillate in
    k on the inverse-separation scale, aliasing into the small-k slope fit,
    so the second center stays within a bump width of the first.
    """
    g = Grid1D(512, 64.0 * np.pi)
    rng = np.random.default_rng(seed)
    xs = g.points
    period = g.period
    out = []
    for _ in range(count):
        x1 = rng.uniform(0.0, period)
        x2 = x1 + rng.uniform(-2.0, 2.0)
        s1, s2 = rng.uniform(2.0, 5.0, 2)
        a1, a2 = rng.uniform(0.01, 0.05, 2)

        def bump(x0, s):
            dd = np.abs(xs - x0)
            dd = np.minimum(dd, period - dd)
            return np.exp(-(dd**2) / (2.0 * s * s))

        out.append(
            PolarState(
                r=SpectralField.from_samples(g, a1 * bump(x1, s1)),
                psi=SpectralField.from_samples(g, a2 * bump(x2, s2)),
                B=SpectralField(g, np.zeros(g.num_modes, complex)),
                time=0.0,
            )
        )
    return out


def run_spectral_report(cfg: ExperimentConfig, threads: int = 1) -> RunReport:
    """Eigenvalue curves, spectral split, damping-envelope fit, semiderivative
    slopes, and the long-wave matrix with its classification."""
    del threads  # dense 3x3 eigenproblems, nothing to distribute
    start = time.perf_counter()
    wt = wavetrain_from_q(cfg.params, cfg.q)
    ks = np.linspace(-10.0, 10.0, 401)
    curves_spec = spectrum_curves(cfg.params, wt, ks)
    rows = []
    for i, k in enumerate(curves_spec.k_samples):
        for branch in range(3):
            lam = curves_spec.eigenvalues[i, branch]
            rows.append(
                CurveRow("spectral-report", float(k), branch, float(lam.real), "re_lambda")
            )
            rows.append(
                CurveRow("spectral-report", float(k), branch, float(lam.imag), "im_lambda")
            )

    records = [{"max_re_lambda": curves_spec.max_real_part, "k_samples": len(ks)}]
    summary = {"max_re_lambda": curves_spec.max_real_part, "stability_tol": STABILITY_TOL}
    split_err = None
    try:
        split = build_split(cfg.params, wt)
    except NoGap as exc:
        split_err = _error_entry(exc)
        split = None
    if split is None:
        records.append({"split_error": split_err})
        summary["split"] = None
        return RunReport(
            experiment="spectral-report",
            config=cfg.to_dict(),
            records=records,
            summary=summary,
            passed=False,
            curves=rows,
        )

    pc0, _ = split.projectors(0.0)
    rank = int(np.linalg.matrix_rank(pc0))
    annihilation = float(np.max(np.abs(pc0 @ np.array([1.0, 0.0, 0.0]))))
    damping = fit_damping_bounds(cfg.params, wt, split, seed=cfg.rng_seed)
    semi = verify_semiderivative(
        split, cfg.params, wt, gaussian_bump_trials(10, cfg.rng_seed),
        min_slope=SEMI_SLOPE_MIN,
    )
    mat, cls = lambda2_prime0(cfg.params, wt)
    mu = center_eigenvalue_derivatives(cfg.params, wt)
    cls_fd = classify_from_derivatives(mu)

    for j, dval in enumerate((damping.d0, damping.d1, damping.d2)):
        rows.append(CurveRow("spectral-report", float(j), 0.0, dval, "damping_constant"))
    for i, slope in enumerate(semi.slopes):
        rows.append(CurveRow("spectral-report", float(i), 0.0, slope, "semi_slope"))

    records.append(
        {
            "delta_lambda": split.delta_lambda,
            "gap": split.gap,
            "pc0_rank": rank,
            "pc0_annihilation": annihilation,
        }
    )
    records.append(
        {
            "damping": {
                "d0": damping.d0,
                "d1": damping.d1,
                "d2": damping.d2,
                "feasible": damping.feasible,
                "max_violation": damping.max_violation,
            }
        }
    )
    records.append({"semiderivative_slopes": semi.slopes, "min_slope": semi.min_slope})
    records.append(
        {
            "lambda2_prime0": [[mat[0, 0], mat[0, 1]], [mat[1, 0], mat[1, 1]]],
            "classification": cls.value,
            "fd_derivatives": [complex(v) for v in mu],
            "fd_classification": cls_fd.value,
        }
    )
    summary.update(
        {
            "split": {"delta_lambda": split.delta_lambda, "gap": split.gap},
            "pc0_rank": rank,
            "pc0_annihilation": annihilation,
            "damping_feasible": damping.feasible,
            "semi_min_slope": semi.min_slope,
            "semi_slope_min": SEMI_SLOPE_MIN,
            "classification": cls.value,
            "fd_classification": cls_fd.value,
            "runtime_s": time.perf_counter() - start,
        }
    )
    passed = (
        curves_spec.max_real_part <= STABILITY_TOL
        and rank == 2
        and annihilation == 0.0
        and damping.feasible
        and semi.passed
        and cls is cls_fd
    )
    return RunReport(
        experiment="spectral-report",
        config=cfg.to_dict(),
        records=records,
        summary=summary,
        passed=passed,
        curves=rows,
    )


# ---------------------------------------------------------------------------
# classification sweep


def run_classify_sweep(
    cfg: ExperimentConfig,
    threads: int = 1,
    alpha_range=(-1.0, 1.0),
    d_range=(-1.0, 1.0),
    points: int = 21,
) -> RunReport:
    """Classify the long-wave matrix over an (alpha, d) lattice and check the
    analytic type against the finite-difference eigenvalue-derivative oracle
    cell by cell."""
    alphas = np.linspace(alpha_range[0], alpha_range[1], points)
    ds = np.linspace(d_range[0], d_range[1], points)

    def one(alpha: float) -> list:
        col = []
        for dv in ds:
            p = dataclasses.replace(cfg.params, alpha=float(alpha), d=float(dv))
            wt = wavetrain_from_q(p, cfg.q)
            _, cls = lambda2_prime0(p, wt)
            fd = classify_from_derivatives(center_eigenvalue_derivatives(p, wt))
            col.append(
                {
                    "alpha": float(alpha),
                    "d": float(dv),
                    "classification": cls.value,
                    "fd_classification": fd.value,
                    "agree": cls is fd,
                }
            )
        return col

    start = time.perf_counter()
    cells = [cell for col in _map_units(one, list(alphas), threads) for cell in col]
    curves = [
        CurveRow(
            "classify-sweep",
            cell["alpha"],
            cell["d"],
            float(_CLASS_CODE[Classification(cell["classification"])]),
            "class_code",
        )
        for cell in cells
    ]
    agree = sum(1 for cell in cells if cell["agree"])
    counts = {}
    for cell in cells:
        counts[cell["classification"]] = counts.get(cell["classification"], 0) + 1
    summary = {
        "q": cfg.q,
        "cells": len(cells),
        "agreement": agree,
        "agreement_fraction": agree / len(cells),
        "counts": counts,
        "alpha_range": list(alpha_range),
        "d_range": list(d_range),
        "points": points,
        "runtime_s": time.perf_counter() - start,
    }
    return RunReport(
        experiment="classify-sweep",
        config=cfg.to_dict(),
        records=cells,
        summary=summary,
        passed=agree == len(cells),
        curves=curves,
    )


# ---------------------------------------------------------------------------
# dispatch

RUNNERS = {
    "wavetrain-invariance": run_wavetrain_invariance,
    "residual-order": run_residual_order,
    "error-scaling": run_error_scaling,
    "spectral-report": run_spectral_report,
    "classify-sweep": run_classify_sweep,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> RunReport:
    """Dispatch on config.experiment."""
    return RUNNERS[cfg.experiment](cfg, threads=threads)
