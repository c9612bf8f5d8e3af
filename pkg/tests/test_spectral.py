"""Spectral core: transforms, multipliers, Gevrey norms, dealiasing."""

import math

import numpy as np
import pytest

from whitham_val import (
    GevreyOverflow,
    GevreyParams,
    Grid1D,
    MultiplierSpec,
    SpectralField,
    antiderivative,
    apply_multiplier,
    chi_bump,
    derivative_symbol,
    gevrey_filter_step,
    gevrey_norm,
    nonlinear_spectra,
    pad_spectrum,
    spectral_derivative,
    to_spectrum,
)
from whitham_val.spectral import _truncate_spectrum, hermitian_defect


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(7, 2 * np.pi)
    with pytest.raises(ValueError):
        Grid1D(6, 2 * np.pi)
    with pytest.raises(ValueError):
        Grid1D(64, 0.0)


def test_grid_layout():
    g = Grid1D(8, 2 * np.pi)
    assert g.points[0] == 0.0
    assert np.isclose(g.dx, 2 * np.pi / 8)
    # Nyquist slot labeled +N/2
    assert list(g.mode_numbers) == [0, 1, 2, 3, 4, -3, -2, -1]
    assert np.allclose(g.wavenumbers, g.mode_numbers.astype(float))


def test_series_convention():
    # u(x) = sum u_j e^{i k_j x}: a pure e^{i3x} puts 1.0 in slot 3
    g = Grid1D(32, 2 * np.pi)
    f = SpectralField.from_samples(g, np.exp(3j * g.points))
    expect = np.zeros(32, complex)
    expect[3] = 1.0
    np.testing.assert_allclose(f.c, expect, atol=1e-14)


def test_roundtrip():
    g = Grid1D(64, 5.0)
    rng = np.random.default_rng(7)
    u = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    f = SpectralField.from_samples(g, u)
    np.testing.assert_allclose(f.samples(), u, atol=1e-13)


def test_derivative_matches_analytic():
    g = Grid1D(64, 2 * np.pi)
    f = SpectralField.from_samples(g, np.sin(g.points))
    df = spectral_derivative(f, 1)
    np.testing.assert_allclose(df.samples().real, np.cos(g.points), atol=1e-13)
    d2f = spectral_derivative(f, 2)
    np.testing.assert_allclose(d2f.samples().real, -np.sin(g.points), atol=1e-12)


def test_derivative_period_scaling():
    g = Grid1D(64, 4 * np.pi)
    f = SpectralField.from_samples(g, np.sin(0.5 * g.points))
    df = spectral_derivative(f, 1)
    np.testing.assert_allclose(
        df.samples().real, 0.5 * np.cos(0.5 * g.points), atol=1e-13
    )


def test_odd_derivative_zeroes_nyquist():
    g = Grid1D(16, 2 * np.pi)
    sym = derivative_symbol(g, 1)
    assert sym[8] == 0.0
    assert derivative_symbol(g, 3)[8] == 0.0
    assert derivative_symbol(g, 2)[8] != 0.0
    # realness preserved for a field with energy in the Nyquist bin
    u = np.cos(8 * g.points)
    f = SpectralField.from_samples(g, u)
    assert spectral_derivative(f, 1).is_real


def test_derivative_symbol_validation():
    g = Grid1D(16, 2 * np.pi)
    with pytest.raises(ValueError):
        derivative_symbol(g, 0)
    with pytest.raises(ValueError):
        derivative_symbol(g, -1)


def test_antiderivative_inverts_derivative():
    g = Grid1D(64, 2 * np.pi)
    rng = np.random.default_rng(3)
    c = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    c[0] = 0.0
    c[32] = 0.0  # mean-zero, no Nyquist content
    c = 0.5 * (c + np.conj(c[g._reverse_index]))
    dc = derivative_symbol(g, 1) * c
    np.testing.assert_allclose(antiderivative(g, dc), c, atol=1e-13)


def test_chi_bump_profile():
    assert chi_bump(0.0, 1.0) == 1.0
    assert chi_bump(0.5, 1.0) == 1.0
    assert chi_bump(1.0, 1.0) == 0.0
    assert chi_bump(2.0, 1.0) == 0.0
    # closed form at |k| = 3 delta/4: s = 1/2, exp(1 - 1/(1 - 1/4)) = exp(-1/3)
    assert math.isclose(chi_bump(0.75, 1.0), math.exp(-1.0 / 3.0), rel_tol=1e-14)
    # monotone decreasing on the blend
    ks = np.linspace(0.5, 1.0, 200)
    v = chi_bump(ks, 1.0)
    assert np.all(np.diff(v) <= 0)


def test_multiplier_symbols():
    g = Grid1D(32, 2 * np.pi)
    k = g.wavenumbers
    m = MultiplierSpec("normal_form_m").symbol(g)
    np.testing.assert_allclose(m.real, np.sqrt(1 + k * k), atol=1e-15)
    minv = MultiplierSpec("normal_form_m_inverse").symbol(g)
    np.testing.assert_allclose(m * minv, np.ones(32), atol=1e-15)
    th = MultiplierSpec("semiderivative_theta", delta=4.0).symbol(g)
    # |theta(k)| <= max(1, delta) * min(1, |k|) and support inside |k| < delta
    bound = max(1.0, 4.0) * np.minimum(1.0, np.abs(k))
    assert np.all(np.abs(th) <= bound + 1e-15)
    assert np.all(th[np.abs(k) >= 4.0] == 0.0)
    with pytest.raises(ValueError):
        MultiplierSpec("no_such_kind").symbol(g)


def test_gevrey_norm_closed_form():
    # sin(x): modes j = +-1, each |u_j|^2 = 1/4
    # norm^2 = 2 * e^{4 sigma} * 2^m / 4
    g = Grid1D(64, 2 * np.pi)
    f = SpectralField.from_samples(g, np.sin(g.points))
    n0 = gevrey_norm(f, GevreyParams(0.5, 0.0))
    assert math.isclose(n0, math.e / math.sqrt(2.0), rel_tol=1e-13)
    n2 = gevrey_norm(f, GevreyParams(0.5, 2.0))
    assert math.isclose(n2, math.e * math.sqrt(2.0), rel_tol=1e-13)


def test_gevrey_norm_monotone_in_sigma():
    g = Grid1D(64, 2 * np.pi)
    rng = np.random.default_rng(11)
    f = SpectralField.from_samples(g, rng.standard_normal(64))
    n_small = gevrey_norm(f, GevreyParams(0.1, 2.0))
    n_big = gevrey_norm(f, GevreyParams(0.3, 2.0))
    assert n_big > n_small


def test_gevrey_overflow_guard():
    g = Grid1D(256, 2 * np.pi)
    f = SpectralField.from_samples(g, np.sin(g.points))
    with pytest.raises(GevreyOverflow):
        gevrey_norm(f, GevreyParams(6.0, 0.0))


def test_filter_step_factor():
    # eta dt = 0.3 on sin(x): both modes scaled by e^{-0.6}
    g = Grid1D(64, 2 * np.pi)
    f = SpectralField.from_samples(g, np.sin(g.points))
    out = gevrey_filter_step(f, 0.3, 1.0)
    for j in (1, -1):
        assert abs(out.c[j] - f.c[j] * math.exp(-0.6)) < 1e-15


def test_filter_norm_transfer():
    # measuring the filtered field at sigma equals measuring the input at
    # sigma - eta dt, mode by mode
    g = Grid1D(64, 2 * np.pi)
    rng = np.random.default_rng(5)
    f = SpectralField.from_samples(g, rng.standard_normal(64))
    eta, dt, sigma = 0.4, 0.05, 0.5
    filtered = gevrey_filter_step(f, eta, dt)
    lhs = gevrey_norm(filtered, GevreyParams(sigma, 2.0))
    rhs = gevrey_norm(f, GevreyParams(sigma - eta * dt, 2.0))
    assert math.isclose(lhs, rhs, rel_tol=1e-12)


def test_filter_mean_exemption():
    g = Grid1D(64, 2 * np.pi)
    f = SpectralField.from_samples(g, 1.0 + np.sin(g.points))
    out = gevrey_filter_step(f, 0.5, 1.0, exempt_mean=True)
    assert out.c[0] == f.c[0]
    assert abs(out.c[1]) < abs(f.c[1])
    out2 = gevrey_filter_step(f, 0.5, 1.0)
    assert abs(out2.c[0]) < abs(f.c[0])


def test_filter_validation():
    g = Grid1D(64, 2 * np.pi)
    f = SpectralField.from_samples(g, np.sin(g.points))
    with pytest.raises(ValueError):
        gevrey_filter_step(f, -0.1, 1.0)
    with pytest.raises(ValueError):
        gevrey_filter_step(f, 0.1, 0.0)
    # eta = 0 is the identity
    out = gevrey_filter_step(f, 0.0, 1.0)
    np.testing.assert_array_equal(out.c, f.c)


def test_pad_truncate_roundtrip():
    rng = np.random.default_rng(9)
    c = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    padded = pad_spectrum(c, 32, 48)
    back = _truncate_spectrum(padded, 48, 32)
    np.testing.assert_array_equal(back, c)
    with pytest.raises(ValueError):
        pad_spectrum(c, 32, 32)


def test_dealias_removes_out_of_band_product():
    # e^{i10x} * e^{i10x} has mode 20, outside the 32-mode band; the plain
    # product aliases it to slot -12, the dealiased product discards it
    g = Grid1D(32, 2 * np.pi)
    c = np.zeros(32, complex)
    c[10] = 1.0
    prod_plain = nonlinear_spectra(g, lambda u: u * u, c, dealias=False)
    prod_clean = nonlinear_spectra(g, lambda u: u * u, c, dealias=True)
    assert abs(prod_plain[-12]) > 0.5
    assert np.max(np.abs(prod_clean)) < 1e-14


def test_dealias_quadratic_exact():
    # sin^2 x = 1/2 - cos(2x)/2
    g = Grid1D(32, 2 * np.pi)
    f = SpectralField.from_samples(g, np.sin(g.points))
    out = nonlinear_spectra(g, lambda u: u * u, f.c)
    expect = np.zeros(32, complex)
    expect[0] = 0.5
    expect[2] = -0.25
    expect[-2] = -0.25
    np.testing.assert_allclose(out, expect, atol=1e-15)


def test_nonlinear_spectra_tuple_output():
    g = Grid1D(32, 2 * np.pi)
    f = SpectralField.from_samples(g, np.cos(g.points))
    a, b = nonlinear_spectra(g, lambda u: (u, u * u), f.c)
    np.testing.assert_allclose(a, f.c, atol=1e-15)
    assert abs(b[0] - 0.5) < 1e-14


def test_field_component_access():
    g = Grid1D(16, 2 * np.pi)
    two = SpectralField(g, np.zeros((2, 16), complex))
    assert two.component_count == 2
    with pytest.raises(ValueError):
        two.c
    with pytest.raises(ValueError):
        SpectralField(g, np.zeros((4, 16), complex))
    with pytest.raises(ValueError):
        SpectralField(g, np.zeros(8, complex))


def test_field_realness_and_mean():
    g = Grid1D(16, 2 * np.pi)
    real_f = SpectralField.from_samples(g, 2.0 + np.cos(g.points))
    assert real_f.is_real
    assert abs(real_f.mean() - 2.0) < 1e-14
    np.testing.assert_allclose(real_f.real_samples(), 2.0 + np.cos(g.points))
    complex_f = SpectralField.from_samples(g, np.exp(1j * g.points))
    assert not complex_f.is_real
    with pytest.raises(ValueError):
        complex_f.real_samples()
    assert hermitian_defect(g, np.zeros(16, complex)) == 0.0


def test_field_copy_is_independent():
    g = Grid1D(16, 2 * np.pi)
    f = SpectralField.from_samples(g, np.sin(g.points))
    f2 = f.copy()
    f2.coefficients[:] = 0.0
    assert np.max(np.abs(f.c)) > 0.1


def test_to_spectrum_wrapper():
    g = Grid1D(16, 2 * np.pi)
    f = to_spectrum(g, np.cos(g.points))
    assert isinstance(f, SpectralField)
    g2 = apply_multiplier(f, MultiplierSpec("derivative", order=1))
    np.testing.assert_allclose(g2.samples().real, -np.sin(g.points), atol=1e-13)
