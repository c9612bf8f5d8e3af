"""Spectral grids, fields and Gevrey-space utilities on the one dimensional torus.

Conventions (fixed; every other module relies on them):

* A field u on a torus of length ``period`` is represented by Fourier series
  coefficients u_j with u(x) = sum_j u_j exp(i k_j x) and k_j = 2 pi j / period.
  ``to_spectrum`` is therefore fft(samples)/N and ``from_spectrum`` its inverse.
* Mode indices run j = -N/2+1 .. N/2. Storage follows the numpy FFT layout;
  the Nyquist slot is labeled +N/2 (sample values are identical to the usual
  -N/2 labeling, only the index bookkeeping differs).
* Gevrey weights are evaluated on the integer mode indices j; multiplier
  symbols that realize differential operators use the physical wavenumbers
  k_j. On the slow torus of period 2 pi the two coincide.
* Odd-order derivative symbols zero the Nyquist bin so real fields stay real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

from .errors import GevreyOverflow

__all__ = [
    "Grid1D",
    "SpectralField",
    "GevreyParams",
    "MultiplierSpec",
    "to_spectrum",
    "from_spectrum",
    "spectral_derivative",
    "apply_multiplier",
    "gevrey_norm",
    "gevrey_filter_step",
    "nonlinear_spectra",
    "pad_spectrum",
    "chi_bump",
    "derivative_symbol",
    "antiderivative",
    "hermitian_defect",
]

REALNESS_RTOL = 1e-13


@dataclass(frozen=True)
class Grid1D:
    """Uniform collocation grid on a torus of length ``period``.

    Attributes:
        num_modes: even number of collocation points, at least 8.
        period: domain length (dimensionless).
    """

    num_modes: int
    period: float

    def __post_init__(self):
        if self.num_modes < 8 or self.num_modes % 2 != 0:
            raise ValueError("num_modes must be an even integer >= 8")
        if not self.period > 0:
            raise ValueError("period must be positive")

    @cached_property
    def points(self) -> NDArray[np.float64]:
        return np.linspace(0.0, self.period, self.num_modes, endpoint=False)

    @cached_property
    def mode_numbers(self) -> NDArray[np.int64]:
        """Integer indices j = -N/2+1 .. N/2 in FFT storage order."""
        n = self.num_modes
        j = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
        j[n // 2] = n // 2  # Nyquist carried as +N/2
        return j

    @cached_property
    def wavenumbers(self) -> NDArray[np.float64]:
        return 2.0 * np.pi * self.mode_numbers / self.period

    @property
    def dx(self) -> float:
        return self.period / self.num_modes

    @cached_property
    def _reverse_index(self) -> NDArray[np.int64]:
        n = self.num_modes
        return (-np.arange(n)) % n

    def fft(self, samples: NDArray) -> NDArray[np.complex128]:
        samples = np.asarray(samples)
        if samples.shape[-1] != self.num_modes:
            raise ValueError(
                f"sample count {samples.shape[-1]} != num_modes {self.num_modes}"
            )
        return np.fft.fft(samples, axis=-1) / self.num_modes

    def ifft(self, coeffs: NDArray) -> NDArray[np.complex128]:
        coeffs = np.asarray(coeffs)
        if coeffs.shape[-1] != self.num_modes:
            raise ValueError(
                f"coefficient count {coeffs.shape[-1]} != num_modes {self.num_modes}"
            )
        return np.fft.ifft(coeffs * self.num_modes, axis=-1)


@dataclass(frozen=True)
class GevreyParams:
    """Analyticity-strip half width ``sigma`` and Sobolev exponent ``m``."""

    sigma: float
    m: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.m < 0:
            raise ValueError("m must be nonnegative")


class SpectralField:
    """Field on a :class:`Grid1D`, stored by Fourier coefficients.

    ``coefficients`` has shape (component_count, num_modes) with
    component_count in {1, 2, 3}. Scalar fields expose their coefficient row
    through :attr:`c`.
    """

    __slots__ = ("grid", "coefficients")

    def __init__(self, grid: Grid1D, coefficients: NDArray):
        arr = np.atleast_2d(np.asarray(coefficients, dtype=np.complex128)).copy()
        if arr.ndim != 2 or arr.shape[0] not in (1, 2, 3):
            raise ValueError("coefficients must have 1, 2 or 3 components")
        if arr.shape[1] != grid.num_modes:
            raise ValueError(
                f"coefficient length {arr.shape[1]} != num_modes {grid.num_modes}"
            )
        self.grid = grid
        self.coefficients = arr

    @classmethod
    def from_samples(cls, grid: Grid1D, samples: NDArray) -> "SpectralField":
        return cls(grid, grid.fft(np.atleast_2d(samples)))

    @property
    def component_count(self) -> int:
        return self.coefficients.shape[0]

    @property
    def c(self) -> NDArray[np.complex128]:
        """Coefficient row of a scalar field."""
        if self.component_count != 1:
            raise ValueError("field has more than one component")
        return self.coefficients[0]

    def component(self, i: int) -> NDArray[np.complex128]:
        return self.coefficients[i]

    def samples(self) -> NDArray[np.complex128]:
        out = self.grid.ifft(self.coefficients)
        return out[0] if self.component_count == 1 else out

    @property
    def is_real(self) -> bool:
        return hermitian_defect(self.grid, self.coefficients) <= REALNESS_RTOL

    def real_samples(self) -> NDArray[np.float64]:
        if not self.is_real:
            raise ValueError("field is not real valued to tolerance")
        out = np.real(self.grid.ifft(self.coefficients))
        return out[0] if self.component_count == 1 else out

    def mean(self) -> complex | NDArray[np.complex128]:
        m = self.coefficients[:, 0]
        return m[0] if self.component_count == 1 else m.copy()

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coefficients)


def hermitian_defect(grid: Grid1D, coeffs: NDArray) -> float:
    """Relative deviation of coefficients from conjugate symmetry."""
    arr = np.atleast_2d(np.asarray(coeffs))
    mirrored = np.conj(arr[..., grid._reverse_index])
    scale = float(np.max(np.abs(arr)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(arr - mirrored))) / scale


def to_spectrum(grid: Grid1D, samples: NDArray) -> SpectralField:
    """Forward transform; coefficients follow the module's series convention."""
    return SpectralField.from_samples(grid, samples)


def from_spectrum(field: SpectralField) -> NDArray[np.complex128]:
    return field.samples()


def derivative_symbol(grid: Grid1D, order: int) -> NDArray[np.complex128]:
    """Symbol (ik)^order; Nyquist bin zeroed for odd orders (realness)."""
    if order < 1 or int(order) != order:
        raise ValueError("order must be a positive integer")
    sym = (1j * grid.wavenumbers) ** order
    if order % 2 == 1:
        sym[grid.num_modes // 2] = 0.0
    return sym


def spectral_derivative(field: SpectralField, order: int) -> SpectralField:
    sym = derivative_symbol(field.grid, order)
    return SpectralField(field.grid, field.coefficients * sym)


def antiderivative(grid: Grid1D, coeffs: NDArray) -> NDArray[np.complex128]:
    """Spectral antiderivative of a mean-zero field; k = 0 and Nyquist bins set to 0."""
    k = grid.wavenumbers.copy()
    k[0] = 1.0  # avoid divide by zero; slot zeroed below
    out = np.asarray(coeffs, dtype=np.complex128) / (1j * k)
    out[..., 0] = 0.0
    out[..., grid.num_modes // 2] = 0.0
    return out


def chi_bump(abs_k: NDArray | float, delta: float) -> NDArray[np.float64]:
    """Cutoff equal to 1 on [0, delta/2], a smooth blend on (delta/2, delta), 0 beyond."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    a = np.atleast_1d(np.asarray(abs_k, dtype=float))
    out = np.zeros_like(a)
    out[a <= delta / 2] = 1.0
    blend = (a > delta / 2) & (a < delta)
    s = 2.0 * a[blend] / delta - 1.0
    out[blend] = np.exp(1.0 - 1.0 / (1.0 - s * s))
    return out if np.ndim(abs_k) else out[0]


@dataclass(frozen=True)
class MultiplierSpec:
    """Named Fourier multiplier.

    kind is one of: derivative (order), normal_form_m, normal_form_m_inverse,
    semiderivative_theta (delta), gevrey_filter (delta_sigma), cutoff_chi (delta).
    For semiderivative_theta the symbol is chi(|k|) * k, which obeys
    |theta(k)| <= min(1, |k|) * c with c = max(1, delta), and vanishes for
    |k| >= delta.
    """

    kind: str
    order: int = 1
    delta: float = 1.0
    delta_sigma: float = 0.0

    def symbol(self, grid: Grid1D) -> NDArray[np.complex128]:
        k = grid.wavenumbers
        if self.kind == "derivative":
            return derivative_symbol(grid, self.order)
        if self.kind == "normal_form_m":
            return np.sqrt(1.0 + k * k).astype(np.complex128)
        if self.kind == "normal_form_m_inverse":
            return (1.0 / np.sqrt(1.0 + k * k)).astype(np.complex128)
        if self.kind == "semiderivative_theta":
            return (chi_bump(np.abs(k), self.delta) * k).astype(np.complex128)
        if self.kind == "gevrey_filter":
            if self.delta_sigma < 0:
                raise ValueError("delta_sigma must be nonnegative")
            j = np.abs(grid.mode_numbers)
            return np.exp(-self.delta_sigma * (1.0 + j)).astype(np.complex128)
        if self.kind == "cutoff_chi":
            return chi_bump(np.abs(k), self.delta).astype(np.complex128)
        raise ValueError(f"unknown multiplier kind {self.kind!r}")


def apply_multiplier(field: SpectralField, spec: MultiplierSpec) -> SpectralField:
    return SpectralField(field.grid, field.coefficients * spec.symbol(field.grid))


def gevrey_norm(field: SpectralField, p: GevreyParams) -> float:
    """Discrete Gevrey norm with weight e^{2 sigma (1+|j|)} (1+j^2)^m on mode indices j."""
    j = field.grid.mode_numbers
    absj = np.abs(j)
    if p.sigma * (1.0 + absj.max()) > 700.0:
        raise GevreyOverflow(
            f"weight exponent sigma*(1+k_max) = {p.sigma * (1.0 + absj.max()):.3g} > 700"
        )
    w = np.exp(2.0 * p.sigma * (1.0 + absj)) * (1.0 + j.astype(float) ** 2) ** p.m
    total = float(np.sum(w * np.abs(field.coefficients) ** 2))
    return math.sqrt(total)


def gevrey_filter_step(
    field: SpectralField, eta: float, dt: float, exempt_mean: bool = False
) -> SpectralField:
    """One shrink step of the analyticity strip: multiply by e^{-eta dt (1+|j|)}.

    Measuring the result in G^m_sigma equals measuring the input in
    G^m_{sigma - eta dt} mode by mode. With ``exempt_mean`` the j = 0 bin is
    left untouched so means are conserved exactly (used by the WME stepper).
    """
    if eta < 0 or dt <= 0:
        raise ValueError("eta must be >= 0 and dt > 0")
    j = np.abs(field.grid.mode_numbers)
    factor = np.exp(-eta * dt * (1.0 + j))
    if exempt_mean:
        factor = factor.copy()
        factor[0] = 1.0
    return SpectralField(field.grid, field.coefficients * factor)


# ---------------------------------------------------------------------------
# Dealiased nonlinear evaluation


def _pad_size(n: int) -> int:
    m = (3 * n) // 2
    return m if m % 2 == 0 else m + 1


def pad_spectrum(coeffs: NDArray, n_from: int, n_to: int) -> NDArray[np.complex128]:
    """Embed the +-N/2 band of an n_from-mode spectrum into n_to slots (n_to > n_from)."""
    if n_to <= n_from:
        raise ValueError("target size must exceed source size")
    arr = np.asarray(coeffs, dtype=np.complex128)
    out = np.zeros(arr.shape[:-1] + (n_to,), dtype=np.complex128)
    pos = n_from // 2 + 1  # slots j = 0 .. N/2
    out[..., :pos] = arr[..., :pos]
    neg = n_from - pos  # slots j = -N/2+1 .. -1
    if neg:
        out[..., n_to - neg :] = arr[..., pos:]
    return out


def _truncate_spectrum(coeffs: NDArray, n_from: int, n_to: int) -> NDArray[np.complex128]:
    arr = np.asarray(coeffs, dtype=np.complex128)
    out = np.empty(arr.shape[:-1] + (n_to,), dtype=np.complex128)
    pos = n_to // 2 + 1
    out[..., :pos] = arr[..., :pos]
    neg = n_to - pos
    if neg:
        out[..., pos:] = arr[..., n_from - neg :]
    return out


def nonlinear_spectra(grid: Grid1D, fn, *inputs: NDArray, dealias: bool = True):
    """Pointwise nonlinearity of spectral inputs, returning output spectra.

    ``fn`` receives one physical sample array per input (complex) and returns a
    single array or a tuple of arrays. With ``dealias`` the evaluation happens
    on a 3/2 zero-padded grid (2/3 rule) so quadratic products are alias free;
    outputs are truncated back to the base band and the Nyquist bin is zeroed.
    """
    n = grid.num_modes
    if dealias:
        m = _pad_size(n)
        phys = [np.fft.ifft(pad_spectrum(c, n, m)) * m for c in inputs]
    else:
        phys = [np.fft.ifft(np.asarray(c, dtype=np.complex128) * n) for c in inputs]
    out = fn(*phys)
    single = not isinstance(out, tuple)
    outs = (out,) if single else out
    res = []
    for o in outs:
        if dealias:
            c = _truncate_spectrum(np.fft.fft(o) / m, m, n)
            c[..., n // 2] = 0.0
        else:
            c = np.fft.fft(o) / n
        res.append(c)
    return res[0] if single else tuple(res)
