import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mollow.bloch import RateSet, steady_state
from mollow.errors import NumericalError, ValidationError
from mollow.spectrum import (PeakRecord, SpectrumResult, _eigen_terms, convolve_resolution,
                             default_grid, g1_correlation, incoherent_spectrum,
                             sideband_fwhm_analytic, spectrum_transform_oracle,
                             voigt_fwhm)
from mollow.units import HBAR


def fwhm_of_curve(x, y):
    """Half-maximum width of a single-peaked sampled curve (linear interpolation)."""
    i = int(np.argmax(y))
    half = y[i] / 2
    j = i
    while y[j] > half:
        j -= 1
    left = x[j] + (half - y[j]) / (y[j + 1] - y[j]) * (x[j + 1] - x[j])
    j = i
    while y[j] > half:
        j += 1
    right = x[j - 1] + (half - y[j - 1]) / (y[j] - y[j - 1]) * (x[j] - x[j - 1])
    return right - left


@st.composite
def driven_rates(draw, min_ratio=0.1, max_ratio=30.0):
    g1 = draw(st.floats(1e-3, 0.05))
    g2 = 0.5 * g1 + draw(st.floats(0.0, 0.1))
    w = g2 * draw(st.floats(min_ratio, max_ratio))
    return RateSet(g1, g2, w)


def test_g1_endpoints():
    r = RateSet(0.02, 0.05, 0.3)
    ss = steady_state(r)
    g = g1_correlation(r, [0.0, 2000.0])
    assert g[0] == pytest.approx(ss.population, abs=1e-15)
    assert g[1] == pytest.approx(abs(ss.coherence) ** 2, abs=1e-12)


def test_g1_matches_eigen_modes():
    r = RateSet(0.01, 0.04, 1.0)
    lam, c, n, s = _eigen_terms(r)
    tau = np.linspace(0, 200, 801)
    direct = g1_correlation(r, tau) - abs(s) ** 2
    modal = (c[None, :] * np.exp(np.outer(tau, lam))).sum(axis=1)
    assert np.max(np.abs(direct - modal)) < 1e-12
    # oscillation at ~ Omega_r, envelope decay (G1 + G2)/2
    side = [l for l in lam if abs(l.imag) > 0]
    assert abs(side[0].imag) == pytest.approx(1.0, rel=1e-3)
    assert -side[0].real == pytest.approx(0.025, rel=1e-12)


def test_g1_validation():
    with pytest.raises(ValidationError):
        g1_correlation(RateSet(0.1, 0.1, 1), [1.0, 0.5])
    with pytest.raises(ValidationError):
        g1_correlation(RateSet(0.1, 0.1, 1), [-1.0, 0.5])


def test_sideband_positions_strong_drive():
    g1, g2 = 0.002, 0.01
    r = RateSet(g1, g2, 1e3 * g2)
    spec = incoherent_spectrum(r)
    red, blue = spec.peak("red-sideband"), spec.peak("blue-sideband")
    assert blue.center == pytest.approx(r.omega_r * HBAR, rel=1e-3)
    assert red.center == pytest.approx(-r.omega_r * HBAR, rel=1e-3)


@given(driven_rates(min_ratio=10, max_ratio=1000))
def test_sideband_width_follows_linewidth_law(r):
    spec = incoherent_spectrum(r)
    gpd_plus_g0 = r.gamma2 - 0.5 * r.gamma1
    expected = sideband_fwhm_analytic(r.gamma1, gpd_plus_g0, 0.0)
    for kind in ("red-sideband", "blue-sideband"):
        assert spec.peak(kind).fwhm == pytest.approx(expected, rel=0.02)
    assert spec.peak("central").fwhm == pytest.approx(2 * r.gamma2 * HBAR, rel=1e-9)
    assert spec.peak("blue-sideband").center / HBAR / r.omega_r >= 0.995


@given(driven_rates())
def test_weights_sum_to_incoherent_fraction(r):
    spec = incoherent_spectrum(r)
    ss = steady_state(r)
    frac = 1 - abs(ss.coherence) ** 2 / ss.population
    assert spec.total_weight == pytest.approx(frac, abs=1e-6)
    assert np.min(spec.intensity) >= -1e-9 * np.max(spec.intensity)
    assert np.allclose(spec.intensity, spec.intensity[::-1], rtol=1e-9, atol=1e-12 * spec.intensity.max())


def test_integrated_intensity_equals_weight():
    r = RateSet(0.01, 0.03, 0.5)
    grid = np.linspace(-2000, 2000, 400001) * 0.03 * HBAR
    spec = incoherent_spectrum(r, grid)
    assert np.trapezoid(spec.intensity, grid) == pytest.approx(spec.total_weight, rel=2e-3)


def test_no_drive_gives_empty_spectrum():
    spec = incoherent_spectrum(RateSet(0.1, 0.2, 0.0))
    assert np.all(spec.intensity == 0) and spec.peaks == []


def test_width_increases_with_dephasing():
    widths = []
    for gpd in np.linspace(0, 0.2, 6):
        r = RateSet.from_components(0.002, gpd, 0.01, 3.0)
        widths.append(incoherent_spectrum(r).peak("blue-sideband").fwhm)
    assert np.all(np.diff(widths) > 0)


@settings(max_examples=8)
@given(driven_rates(max_ratio=10.0))
def test_transform_oracle_agrees(r):
    exact = incoherent_spectrum(r)
    brute = spectrum_transform_oracle(r, exact.detuning_grid)
    assert brute.peaks == []
    err = np.max(np.abs(brute.intensity - exact.intensity)) / np.max(exact.intensity)
    assert err < 0.02


def test_transform_oracle_symmetry_and_total():
    r = RateSet(0.01, 0.03, 0.4)
    grid = np.linspace(-60, 60, 1201) * 0.4 * HBAR
    brute = spectrum_transform_oracle(r, grid)
    mirrored = brute.intensity[::-1]
    assert np.max(np.abs(brute.intensity - mirrored)) <= 0.01 * brute.intensity.max()
    exact = incoherent_spectrum(r, grid)
    assert np.trapezoid(brute.intensity, grid) == pytest.approx(
        np.trapezoid(exact.intensity, grid), rel=0.01)


def test_transform_oracle_rejects_short_span():
    with pytest.raises(NumericalError):
        spectrum_transform_oracle(RateSet(0.01, 0.03, 0.4), correlation_times=3.0)


def test_critical_damping_falls_back_to_oracle():
    g1, g2 = 0.01, 0.05
    r = RateSet(g1, g2, (g2 - g1) / 2)
    with pytest.warns(RuntimeWarning, match="defective"):
        spec = incoherent_spectrum(r)
    assert spec.peaks == []
    near = incoherent_spectrum(RateSet(g1, g2, (g2 - g1) / 2 * (1 + 1e-3)), spec.detuning_grid)
    assert np.max(np.abs(spec.intensity - near.intensity)) < 0.01 * near.intensity.max()


def test_sideband_fwhm_analytic_values():
    g1 = 1 / 561
    assert sideband_fwhm_analytic(g1, 0, 0) == pytest.approx(1.5 * g1 * HBAR)
    # T1 = 561 ps, gamma0 = 30 ueV, chi_F = 2.0e-4 at 72 ueV (mpmath: 32.79672501845)
    w = sideband_fwhm_analytic(g1, 2.0e-4 * 72**2 / HBAR, 30 / HBAR)
    assert w == pytest.approx(32.7967250184492, rel=1e-12)
    assert 31 - 7 <= w <= 31 + 7
    with pytest.raises(ValidationError):
        sideband_fwhm_analytic(-1, 0, 0)


def test_default_grid():
    r = RateSet(0.01, 0.02, 0.1)
    g = default_grid(r)
    assert g.size == 2048 and g[-1] == pytest.approx(0.4 * HBAR) and g[0] == -g[-1]


def test_convolution_identity_and_delta():
    x = np.linspace(-100, 100, 2001)
    y = np.exp(-x**2 / 50)
    s = SpectrumResult(x, y, [PeakRecord(0, 10, 1, "central")])
    same = convolve_resolution(s, 0)
    assert np.array_equal(same.intensity, y) and same.peaks == s.peaks
    delta = np.zeros_like(x)
    delta[1000] = 1.0
    out = convolve_resolution(SpectrumResult(x, delta, []), 20.0)
    assert fwhm_of_curve(x, out.intensity) == pytest.approx(20.0, rel=2e-3)
    assert out.intensity.sum() == pytest.approx(1.0, rel=1e-9)


def test_voigt_width_of_measured_sideband():
    # numeric Lorentzian (31 ueV) * Gaussian (20 ueV); scipy voigt_profile gives 41.2377 ueV
    x = np.linspace(-3000, 3000, 600001)
    lor = 15.5 / math.pi / (x**2 + 15.5**2)
    s = SpectrumResult(x, lor, [PeakRecord(0.0, 31.0, 1.0, "blue-sideband")])
    out = convolve_resolution(s, 20.0)
    numeric = fwhm_of_curve(x, out.intensity)
    assert numeric == pytest.approx(41.2377, rel=1e-3)
    assert out.peaks[0].fwhm == pytest.approx(numeric, rel=0.01)
    assert voigt_fwhm(31, 20) == pytest.approx(41.2377, rel=0.01)


def test_convolution_rejects_nonuniform_grid():
    x = np.array([0, 1, 3, 4, 5.0])
    with pytest.raises(ValidationError):
        convolve_resolution(SpectrumResult(x, np.ones(5), []), 1.0)
    with pytest.raises(ValidationError):
        convolve_resolution(SpectrumResult(np.arange(5.0), np.ones(5), []), -1.0)


def test_raw_half_maximum_width_converges_to_linewidth_law():
    # the sampled curve carries the central-line tail and dispersive terms, so
    # its half-maximum width only approaches the component width at strong drive
    g1, g2 = 0.01, 0.012
    devs = []
    for ratio in (10, 30, 100):
        r = RateSet(g1, g2, g2 * ratio)
        W, G = r.omega_r * HBAR, r.gamma2 * HBAR
        x = np.linspace(W - 8 * G, W + 8 * G, 20001)
        raw = fwhm_of_curve(x, incoherent_spectrum(r, x).intensity)
        devs.append(abs(raw / sideband_fwhm_analytic(g1, g2 - 0.5 * g1, 0.0) - 1))
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 2e-3
