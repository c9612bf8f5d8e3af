"""Modulation conservation laws on the slow torus: flux evaluation, the
algebraic leading-order amplitude, hyperbolicity classification, and a
spectral solver evolving in a Gevrey scale whose strip width shrinks linearly
in slow time (explicit RK4 plus a per-step smoothing filter)."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import (
    BlowUp,
    NonPositiveAmplitude,
    SmallnessViolated,
    StripExhausted,
)
from .model import GglParams, WaveTrain
from .spectral import (
    GevreyParams,
    Grid1D,
    SpectralField,
    derivative_symbol,
    gevrey_filter_step,
    gevrey_norm,
    nonlinear_spectra,
)

__all__ = [
    "ModulationState",
    "WmeConfig",
    "Classification",
    "wme_flux",
    "solve_r0",
    "classify_matrix",
    "classify_wme",
    "estimate_eta",
    "wme_step",
    "wme_solve",
]

SLOW_PERIOD = 2.0 * np.pi


class Classification(str, enum.Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"
    DEGENERATE = "degenerate"


@dataclass
class ModulationState:
    """Slow fields (psi_check, B_check) on the X-torus of period 2 pi, plus
    slow time T and the remaining analyticity-strip width."""

    psi_check: SpectralField
    B_check: SpectralField
    T: float = 0.0
    sigma_current: float = 0.0

    def __post_init__(self):
        g = self.psi_check.grid
        if self.B_check.grid != g:
            raise ValueError("psi_check and B_check must share a grid")
        if abs(g.period - SLOW_PERIOD) > 1e-12 * SLOW_PERIOD:
            raise ValueError("slow fields live on the torus of period 2 pi")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.sigma_current < 0:
            raise ValueError("sigma_current must be nonnegative")

    @property
    def grid(self) -> Grid1D:
        return self.psi_check.grid

    def stacked(self) -> NDArray[np.complex128]:
        return np.stack([self.psi_check.c, self.B_check.c])


@dataclass(frozen=True)
class WmeConfig:
    """Solver knobs. ``eta`` is the strip shrink rate; None selects it at solve
    time via :func:`estimate_eta` with safety factor 2. The solve horizon must
    satisfy T_max < sigma0 / eta."""

    eta: float | None = None
    sigma0: float = 0.5
    dt: float = 2e-3
    m: float = 2.0
    smallness_bound: float = 0.25
    cfl_const: float = 0.9
    dealias: bool = True

    def __post_init__(self):
        if self.eta is not None and self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if self.sigma0 <= 0 or self.dt <= 0:
            raise ValueError("sigma0 and dt must be positive")
        if self.m < 0 or self.smallness_bound <= 0 or self.cfl_const <= 0:
            raise ValueError("m >= 0, smallness_bound > 0, cfl_const > 0 required")


def _flux_coeffs(params: GglParams, wt: WaveTrain) -> tuple[float, ...]:
    """Linear/quadratic coefficients of both fluxes in (psi, psi^2, B)."""
    al, be = params.alpha, params.beta
    q = wt.q
    c1_psi = 2.0 * q * (be - al)
    c1_psi2 = be - al
    c1_b = params.gamma_i - be * params.gamma_r
    c2_psi = -2.0 * params.d * q
    c2_psi2 = -params.d
    c2_b = params.c + params.d * params.gamma_r
    return c1_psi, c1_psi2, c1_b, c2_psi, c2_psi2, c2_b


def wme_flux(psi, B, params: GglParams, wt: WaveTrain, dealias: bool = True):
    """Fluxes of the slow conservation laws, d/dT (psi, B) = d/dX (f1, f2).

    Scalars in, scalars out; SpectralFields in, SpectralFields out (quadratic
    term dealiased)."""
    c1p, c1p2, c1b, c2p, c2p2, c2b = _flux_coeffs(params, wt)
    if isinstance(psi, SpectralField):
        grid = psi.grid
        psi2 = nonlinear_spectra(grid, lambda u: u * u, psi.c, dealias=dealias)
        f1 = c1p * psi.c + c1p2 * psi2 + c1b * B.c
        f2 = c2p * psi.c + c2p2 * psi2 + c2b * B.c
        return SpectralField(grid, f1), SpectralField(grid, f2)
    psi2 = psi * psi
    return (
        c1p * psi + c1p2 * psi2 + c1b * B,
        c2p * psi + c2p2 * psi2 + c2b * B,
    )


def solve_r0(
    psi: SpectralField, B: SpectralField, params: GglParams, wt: WaveTrain
) -> SpectralField:
    """Leading-order amplitude from the algebraic balance
    e^{2 r} = 1 + e^{-2 rho} (-2 q psi - psi^2 + gamma_r B), solved pointwise."""
    grid = psi.grid
    ps = np.real(psi.samples())
    bs = np.real(B.samples())
    arg = 1.0 + math.exp(-2.0 * wt.rho) * (
        -2.0 * wt.q * ps - ps * ps + params.gamma_r * bs
    )
    amin = float(arg.min())
    if amin <= 0.0:
        raise NonPositiveAmplitude(
            f"amplitude balance argument reaches {amin:.3e} <= 0"
        )
    return SpectralField.from_samples(grid, 0.5 * np.log(arg))


def classify_matrix(M: NDArray) -> Classification:
    """Discriminant sign of a real 2x2 matrix, with a relative degeneracy band."""
    tr = M[0, 0] + M[1, 1]
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    disc = tr * tr - 4.0 * det
    tol = 1e-12 * (tr * tr + abs(det))
    if disc > tol:
        return Classification.HYPERBOLIC
    if disc < -tol:
        return Classification.ELLIPTIC
    return Classification.DEGENERATE


def _classify_coeff_matrix(params: GglParams, wt: WaveTrain, psi_value: float):
    s = wt.q + psi_value
    return np.array(
        [
            [2.0 * (params.beta - params.alpha) * s, params.gamma_i - params.beta * params.gamma_r],
            [-2.0 * params.d * s, params.c + params.d * params.gamma_r],
        ]
    )


def classify_wme(
    params: GglParams, wt: WaveTrain, psi_value: float = 0.0
) -> Classification:
    """Type of the slow system at a local state value: hyperbolic (real distinct
    characteristics), elliptic (complex pair), or degenerate."""
    return classify_matrix(_classify_coeff_matrix(params, wt, psi_value))


def _pointwise_matrices(
    params: GglParams, wt: WaveTrain, psi_samples: NDArray
) -> NDArray:
    s = wt.q + np.asarray(psi_samples, dtype=float)
    n = s.shape[0]
    M = np.empty((n, 2, 2))
    M[:, 0, 0] = 2.0 * (params.beta - params.alpha) * s
    M[:, 0, 1] = params.gamma_i - params.beta * params.gamma_r
    M[:, 1, 0] = -2.0 * params.d * s
    M[:, 1, 1] = params.c + params.d * params.gamma_r
    return M


def estimate_eta(
    state: ModulationState, params: GglParams, wt: WaveTrain, safety: float = 2.0
) -> float:
    """Strip shrink rate sufficient to dominate the flux Jacobian: returns
    safety * (max_X spectral_radius(M) + max_X |Im lambda|) + 1."""
    if safety < 1.0:
        raise ValueError("safety must be >= 1")
    ps = np.real(state.psi_check.samples())
    lam = np.linalg.eigvals(_pointwise_matrices(params, wt, ps))
    radius = float(np.max(np.abs(lam)))
    imag_part = float(np.max(np.abs(lam.imag)))
    return safety * (radius + imag_part) + 1.0


def _max_wave_speed(params: GglParams, wt: WaveTrain, psi_samples: NDArray) -> float:
    lam = np.linalg.eigvals(_pointwise_matrices(params, wt, psi_samples))
    return float(np.max(np.abs(lam)))


def _resolve_eta(
    config: WmeConfig, state: ModulationState, params: GglParams, wt: WaveTrain
) -> float:
    if config.eta is not None:
        return config.eta
    return estimate_eta(state, params, wt, safety=2.0)


def _rhs(grid: Grid1D, u: NDArray, coeffs, d1: NDArray, dealias: bool) -> NDArray:
    c1p, c1p2, c1b, c2p, c2p2, c2b = coeffs
    psi2 = nonlinear_spectra(grid, lambda w: w * w, u[0], dealias=dealias)
    f1 = c1p * u[0] + c1p2 * psi2 + c1b * u[1]
    f2 = c2p * u[0] + c2p2 * psi2 + c2b * u[1]
    return np.stack([d1 * f1, d1 * f2])


def wme_step(
    state: ModulationState, params: GglParams, wt: WaveTrain, config: WmeConfig
) -> ModulationState:
    """One RK4 step of the conservation form followed by a strip-shrink filter
    applied to the k != 0 modes (the means are conserved exactly)."""
    eta = _resolve_eta(config, state, params, wt)
    dt = config.dt
    if eta > 0 and state.sigma_current - eta * dt <= 0:
        raise StripExhausted(state.T)
    grid = state.grid
    ps = np.real(state.psi_check.samples())
    speed = _max_wave_speed(params, wt, ps)
    if speed > 0 and dt > config.cfl_const * grid.dx / speed:
        raise ValueError(
            f"dt = {dt:g} violates the CFL bound "
            f"{config.cfl_const * grid.dx / speed:g} at wave speed {speed:g}"
        )
    coeffs = _flux_coeffs(params, wt)
    d1 = derivative_symbol(grid, 1)
    u = state.stacked()
    k1 = _rhs(grid, u, coeffs, d1, config.dealias)
    k2 = _rhs(grid, u + 0.5 * dt * k1, coeffs, d1, config.dealias)
    k3 = _rhs(grid, u + 0.5 * dt * k2, coeffs, d1, config.dealias)
    k4 = _rhs(grid, u + dt * k3, coeffs, d1, config.dealias)
    out = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.isfinite(out).all():
        raise BlowUp(state.T + dt)
    field = SpectralField(grid, out)
    if eta > 0:
        field = gevrey_filter_step(field, eta, dt, exempt_mean=True)
    return ModulationState(
        psi_check=SpectralField(grid, field.component(0)),
        B_check=SpectralField(grid, field.component(1)),
        T=state.T + dt,
        sigma_current=state.sigma_current - eta * dt,
    )


def _monitor_norm(state: ModulationState, config: WmeConfig) -> float:
    stacked = SpectralField(state.grid, state.stacked())
    return gevrey_norm(stacked, GevreyParams(state.sigma_current, config.m + 1.0))


def wme_solve(
    initial: ModulationState,
    params: GglParams,
    wt: WaveTrain,
    config: WmeConfig,
    T_end: float,
    sample_times=None,
) -> list[ModulationState]:
    """Integrate the slow system to the requested sample times, monitoring the
    Gevrey norm at the shrunk strip width against the smallness bound."""
    if T_end < initial.T:
        raise ValueError("T_end precedes the initial slow time")
    eta = _resolve_eta(config, initial, params, wt)
    if eta > 0 and eta * (T_end - initial.T) >= initial.sigma_current:
        raise StripExhausted(initial.T)

    def check_smallness(s: ModulationState):
        value = _monitor_norm(s, config)
        if value > config.smallness_bound:
            raise SmallnessViolated(s.T, value, config.smallness_bound)

    check_smallness(initial)
    samples = [T_end] if sample_times is None else list(sample_times)
    if any(b < a for a, b in zip(samples, samples[1:])):
        raise ValueError("sample_times must be sorted ascending")
    if samples and (samples[0] < initial.T - 1e-12 or samples[-1] > T_end + 1e-12):
        raise ValueError("sample_times must lie within [T0, T_end]")

    out: list[ModulationState] = []
    state = initial
    for target in samples:
        span = target - state.T
        if span <= 1e-14:
            out.append(state)
            continue
        n_steps = max(1, math.ceil(span / config.dt - 1e-9))
        h = span / n_steps
        sub = dataclasses.replace(config, dt=h, eta=eta)
        t0, sig0 = state.T, state.sigma_current
        for i in range(1, n_steps + 1):
            state = wme_step(state, params, wt, sub)
            # exact bookkeeping, avoid accumulated drift
            state.T = t0 + i * h if i < n_steps else target
            state.sigma_current = sig0 - eta * (state.T - t0)
            check_smallness(state)
        out.append(state)
    return out
