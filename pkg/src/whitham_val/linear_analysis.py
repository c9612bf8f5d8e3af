"""Fourier-symbol analysis of the linearization about a wave train: symbol
assembly in the weighted variables (r, psi/m(k), B) with m(k) = sqrt(1+k^2),
eigenvalue curves, the rank-one spectral projection onto the isolated
negative eigenvalue, smooth center/stable splitting, the semiderivative
property of the center-projected nonlinearity, the 2x2 long-wave matrix
driving the slow system's linearization, and sampled damping-bound fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linprog

from .errors import NoGap
from .model import GglParams, PolarState, WaveTrain
from .spectral import chi_bump, derivative_symbol
from .wme import Classification, _classify_coeff_matrix, classify_matrix

__all__ = [
    "LambdaSymbol",
    "SpectralSplit",
    "SpectrumCurves",
    "SemiderivativeReport",
    "DampingFit",
    "assemble_lambda_hat",
    "spectrum_curves",
    "build_split",
    "w_nonlinearity",
    "verify_semiderivative",
    "lambda2_prime0",
    "center_eigenvalue_derivatives",
    "classify_from_derivatives",
    "fit_damping_bounds",
]


def _sorted_eigvals(matrix: NDArray) -> NDArray[np.complex128]:
    ev = np.linalg.eigvals(matrix)
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


@dataclass
class LambdaSymbol:
    """Linearization symbol at one frequency: 3x3 matrix and its spectrum."""

    k: float
    matrix: NDArray[np.complex128]
    eigenvalues: NDArray[np.complex128]
    params: GglParams
    wt: WaveTrain

    def __post_init__(self):
        if self.matrix.shape != (3, 3):
            raise ValueError("matrix must be 3x3")
        if self.eigenvalues.shape != (3,):
            raise ValueError("three eigenvalues expected")


def assemble_lambda_hat(k: float, params: GglParams, wt: WaveTrain) -> LambdaSymbol:
    """Symbol of the linearized deviation system in the weighted variables;
    eigenvalues sorted by ascending real part (imaginary tiebreak)."""
    p, q = params, wt.q
    e2rho = wt.amplitude_sq()
    m = math.sqrt(1.0 + k * k)
    mat = np.array(
        [
            [
                -k * k - 2.0 * e2rho - 2j * p.alpha * q * k,
                -1j * p.alpha * k * m - 2.0 * q * m,
                p.gamma_r,
            ],
            [
                (-1j * p.alpha * k**3 - 2j * p.beta * e2rho * k - 2.0 * q * k * k) / m,
                -k * k - 2j * p.alpha * q * k,
                1j * p.gamma_i * k / m,
            ],
            [
                2j * p.d * e2rho * k,
                0.0,
                -p.a * k * k + 1j * p.c * k,
            ],
        ],
        dtype=np.complex128,
    )
    return LambdaSymbol(
        k=k, matrix=mat, eigenvalues=_sorted_eigvals(mat), params=params, wt=wt
    )


@dataclass
class SpectrumCurves:
    """Sorted eigenvalue curves over a frequency sample set."""

    k_samples: NDArray[np.float64]
    eigenvalues: NDArray[np.complex128]  # shape (len(k_samples), 3)
    max_real_part: float


def spectrum_curves(
    params: GglParams, wt: WaveTrain, k_samples
) -> SpectrumCurves:
    ks = np.asarray(k_samples, dtype=float)
    if not np.isfinite(ks).all():
        raise ValueError("k_samples must be finite")
    ev = np.empty((ks.size, 3), dtype=np.complex128)
    for i, k in enumerate(ks):
        ev[i] = assemble_lambda_hat(float(k), params, wt).eigenvalues
    return SpectrumCurves(
        k_samples=ks, eigenvalues=ev, max_real_part=float(ev.real.max())
    )


# ---------------------------------------------------------------------------
# spectral splitting


def _p1_matrix(sym: LambdaSymbol) -> NDArray[np.complex128]:
    """Rank-one spectral projection onto the isolated bottom eigenvalue,
    built from matched right and left eigenvectors. At k = 0 the closed form
    is used so the projection entries are exact."""
    if sym.k == 0.0:
        e2rho = sym.wt.amplitude_sq()
        q, gr = sym.wt.q, sym.params.gamma_r
        v = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
        w = np.array(
            [1.0, q / e2rho, -0.5 * gr / e2rho], dtype=np.complex128
        )
        return np.outer(v, w.conj())
    lam1 = sym.eigenvalues[0]
    wr, vr = np.linalg.eig(sym.matrix)
    i_r = int(np.argmin(np.abs(wr - lam1)))
    v = vr[:, i_r]
    wl, vl = np.linalg.eig(sym.matrix.conj().T)
    i_l = int(np.argmin(np.abs(wl - np.conj(lam1))))
    w = vl[:, i_l]
    return np.outer(v, w.conj()) / (w.conj() @ v)


def _separation(sym: LambdaSymbol) -> float:
    ev = sym.eigenvalues
    return float(min(abs(ev[0] - ev[1]), abs(ev[0] - ev[2])))


@dataclass
class SpectralSplit:
    """Smooth center/stable splitting P_c(k) = chi(k) (I - P1(k)); the cutoff
    radius delta_lambda is the largest radius <= 1 on which the bottom
    eigenvalue stays separated from the center pair by at least the verified
    gap."""

    delta_lambda: float
    gap: float
    projectors: Callable[[float], tuple[NDArray, NDArray]]
    params: GglParams
    wt: WaveTrain

    def __post_init__(self):
        if self.delta_lambda <= 0 or self.gap <= 0:
            raise ValueError("delta_lambda and gap must be positive")


def build_split(
    params: GglParams, wt: WaveTrain, gap_min: float | None = None
) -> SpectralSplit:
    """Bisect for the largest splitting radius <= 1 with eigenvalue
    separation >= gap_min (default: half the k = 0 gap 2 e^{2 rho})."""
    e2rho = wt.amplitude_sq()
    if gap_min is None:
        gap_min = e2rho  # 0.5 * (2 e^{2 rho})
    if gap_min <= 0:
        raise ValueError("gap_min must be positive")
    if 2.0 * e2rho <= gap_min:
        raise NoGap(
            f"k = 0 separation {2.0 * e2rho:.6g} does not exceed gap_min "
            f"= {gap_min:.6g}"
        )

    def min_sep(delta: float) -> float:
        # symbol at -k is the conjugate of the symbol at k; sample k >= 0
        ks = np.linspace(0.0, delta, 65)
        return min(
            _separation(assemble_lambda_hat(float(k), params, wt)) for k in ks
        )

    if min_sep(1.0) >= gap_min:
        delta = 1.0
    else:
        lo, hi = 0.0, 1.0
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if min_sep(mid) >= gap_min:
                lo = mid
            else:
                hi = mid
        delta = lo
    if delta <= 0.0:
        raise NoGap("no positive splitting radius sustains the requested gap")
    gap = min_sep(delta)
    eye = np.eye(3, dtype=np.complex128)

    def projectors(k: float) -> tuple[NDArray, NDArray]:
        chi = float(chi_bump(abs(k), delta))
        if chi == 0.0:
            return np.zeros((3, 3), np.complex128), eye.copy()
        p1 = _p1_matrix(assemble_lambda_hat(k, params, wt))
        pc = chi * (eye - p1)
        return pc, eye - pc

    return SpectralSplit(
        delta_lambda=delta, gap=gap, projectors=projectors, params=params, wt=wt
    )


# ---------------------------------------------------------------------------
# semiderivative property


def w_nonlinearity(
    state: PolarState, params: GglParams, wt: WaveTrain
) -> NDArray[np.complex128]:
    """Spectra of the nonlinear remainder of the deviation system (full right
    side minus its linearization), transformed to the weighted variables:
    rows (N_r, N_psi / m(k), N_B)."""
    g = state.grid
    p = params
    e2rho = wt.amplitude_sq()
    d1 = derivative_symbol(g, 1)
    r = np.real(state.r.samples())
    psi = np.real(state.psi.samples())
    dr = np.real(g.ifft(d1 * state.r.c))
    # expm1 keeps the quadratic remainder accurate for small r
    rem = np.expm1(2.0 * r) - 2.0 * r  # e^{2r} - 1 - 2r
    n_r = -e2rho * rem + dr * dr - psi * psi - 2.0 * p.alpha * psi * dr
    n_psi_hat = d1 * (
        -p.beta * e2rho * g.fft(rem)
        + p.alpha * g.fft(dr * dr)
        - p.alpha * g.fft(psi * psi)
        + 2.0 * g.fft(psi * dr)
    )
    n_b_hat = p.d * e2rho * d1 * g.fft(rem)
    m = np.sqrt(1.0 + g.wavenumbers**2)
    return np.stack([g.fft(n_r), n_psi_hat / m, n_b_hat])


@dataclass
class SemiderivativeReport:
    """Per-trial slopes of the center-projected nonlinearity near k = 0 and
    the algebraic annihilation check at k = 0."""

    slopes: list[float]
    pc0_image_max: float
    min_slope: float
    passed: bool


def verify_semiderivative(
    split: SpectralSplit,
    params: GglParams,
    wt: WaveTrain,
    trial_fields: list[PolarState],
    min_slope: float = 0.9,
) -> SemiderivativeReport:
    """Check that the center projection annihilates the non-derivative
    direction at k = 0 exactly, and that |P_c g^(k)| vanishes at least like
    |k| (slope fit over the three smallest nonzero grid frequencies)."""
    pc0, _ = split.projectors(0.0)
    probes = [1.0, 1j, 0.37 - 1.41j]
    pc0_image = max(
        float(np.max(np.abs(pc0 @ np.array([x, 0.0, 0.0])))) for x in probes
    )
    slopes = []
    for state in trial_fields:
        g = state.grid
        spectra = w_nonlinearity(state, params, wt)
        mags = []
        ks = []
        for j in (1, 2, 3):
            k = float(g.wavenumbers[j])
            pc, _ = split.projectors(k)
            mags.append(float(np.linalg.norm(pc @ spectra[:, j])))
            ks.append(k)
        if min(mags) <= 0.0:
            slopes.append(math.inf)  # identically zero projection
            continue
        slope = float(np.polyfit(np.log(ks), np.log(mags), 1)[0])
        slopes.append(slope)
    return SemiderivativeReport(
        slopes=slopes,
        pc0_image_max=pc0_image,
        min_slope=min(slopes) if slopes else math.inf,
        passed=pc0_image == 0.0 and all(s >= min_slope for s in slopes),
    )


# ---------------------------------------------------------------------------
# long-wave matrix of the slow system


def lambda2_prime0(
    params: GglParams, wt: WaveTrain
) -> tuple[NDArray[np.float64], Classification]:
    """First k-derivative (per ik) of the center block at k = 0: the 2x2 real
    matrix whose product with d/dX is the linearization of the slow system,
    with its type classification."""
    mat = _classify_coeff_matrix(params, wt, 0.0)
    return mat, classify_matrix(mat)


def center_eigenvalue_derivatives(
    params: GglParams, wt: WaveTrain, step: float = 1e-4
) -> NDArray[np.complex128]:
    """d lambda / d(ik) at k = 0 for the two center eigenvalues of the full
    symbol, by centered finite differences with branch pairing across k = 0."""
    if step <= 0:
        raise ValueError("step must be positive")
    e2rho = wt.amplitude_sq()

    def center_pair(k: float) -> NDArray[np.complex128]:
        ev = assemble_lambda_hat(k, params, wt).eigenvalues
        drop = int(np.argmin(np.abs(ev - (-2.0 * e2rho))))
        return np.delete(ev, drop)

    plus = center_pair(step)
    minus = center_pair(-step)
    mu_p = plus / (1j * step)
    mu_m = minus / (-1j * step)
    # pair the branches across k = 0 by first-derivative proximity
    direct = abs(mu_p[0] - mu_m[0]) + abs(mu_p[1] - mu_m[1])
    swapped = abs(mu_p[0] - mu_m[1]) + abs(mu_p[1] - mu_m[0])
    if swapped < direct:
        minus = minus[::-1]
    return (plus - minus) / (2j * step)


def classify_from_derivatives(mu: NDArray) -> Classification:
    """Type classification from the two center eigenvalue derivatives:
    discriminant of the pair with a band absorbing finite-difference noise."""
    tr = mu[0] + mu[1]
    det = mu[0] * mu[1]
    disc = (mu[0] - mu[1]) ** 2
    tol = 1e-6 * (abs(tr) ** 2 + abs(det)) + 1e-12
    if disc.real > tol:
        return Classification.HYPERBOLIC
    if disc.real < -tol:
        return Classification.ELLIPTIC
    return Classification.DEGENERATE


# ---------------------------------------------------------------------------
# sampled damping-bound fit


@dataclass
class DampingFit:
    """Fitted positive constants for the sampled quadratic-form bounds
    Re<V_s, Lambda V_s> <= (-d0 + d1 |k| - d2 k^2) |V_s|^2 and
    Re<V_c, Lambda V_c> <= d1 |k| |V_c|^2."""

    d0: float
    d1: float
    d2: float
    feasible: bool
    max_violation: float

    def envelope_stable(self, k: float) -> float:
        return -self.d0 + self.d1 * abs(k) - self.d2 * k * k


def fit_damping_bounds(
    params: GglParams,
    wt: WaveTrain,
    split: SpectralSplit,
    k_samples=None,
    trials: int = 8,
    seed: int = 0,
) -> DampingFit:
    """Linear-program fit of (d0, d1, d2) > 0 over sampled frequencies and
    randomized probe vectors; minimizes d1 subject to every sampled bound."""
    if k_samples is None:
        k_samples = np.linspace(-10.0, 10.0, 401)
    ks = np.asarray(k_samples, dtype=float)
    rng = np.random.default_rng(seed)
    rows = []
    rhs = []
    records = []  # (kind, |k|, k^2, value) for violation recheck
    for k in ks:
        sym = assemble_lambda_hat(float(k), params, wt)
        pc, ps = split.projectors(float(k))
        V = rng.standard_normal((3, trials)) + 1j * rng.standard_normal((3, trials))
        for kind, proj in (("s", ps), ("c", pc)):
            W = proj @ V
            nrm2 = np.sum(np.abs(W) ** 2, axis=0)
            vals = np.real(np.sum(np.conj(W) * (sym.matrix @ W), axis=0))
            for n2, val in zip(nrm2, vals):
                if n2 < 1e-20:
                    continue
                ratio = val / n2
                if kind == "s":
                    # d0 - d1 |k| + d2 k^2 <= -ratio
                    rows.append((1.0, -abs(k), k * k))
                    rhs.append(-ratio)
                    records.append(("s", abs(k), k * k, ratio))
                else:
                    # -d1 |k| <= -ratio
                    rows.append((0.0, -abs(k), 0.0))
                    rhs.append(-ratio)
                    records.append(("c", abs(k), 0.0, ratio))
    floor = 1e-9
    for i in range(3):
        row = [0.0, 0.0, 0.0]
        row[i] = -1.0
        rows.append(tuple(row))
        rhs.append(-floor)
    # prefer a strong statement: large decay floor d0 and curvature d2,
    # small linear growth d1; bounded because every d2 gain costs d1
    res = linprog(
        c=[-1.0, 1.0, -1.0],
        A_ub=np.asarray(rows),
        b_ub=np.asarray(rhs),
        bounds=[(None, None)] * 3,
        method="highs",
    )
    if not res.success:
        return DampingFit(
            d0=math.nan, d1=math.nan, d2=math.nan,
            feasible=False, max_violation=math.inf,
        )
    d0, d1, d2 = (float(v) for v in res.x)
    viol = 0.0
    for kind, ak, k2, ratio in records:
        if kind == "s":
            bound = -d0 + d1 * ak - d2 * k2
        else:
            bound = d1 * ak
        viol = max(viol, ratio - bound)
    return DampingFit(
        d0=d0, d1=d1, d2=d2,
        feasible=bool(min(d0, d1, d2) > 0 and viol <= 1e-9),
        max_violation=viol,
    )
