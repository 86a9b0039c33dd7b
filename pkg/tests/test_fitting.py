import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mollow.errors import ValidationError
from mollow.fitting.report import fit_least_squares
from mollow.fitting import (FitReport, SeriesPoint, correct_g2_background,
                            extract_alpha_from_temperature, fit_linear,
                            fit_mollow_spectrum, fit_rabi_curve, g2_from_histogram,
                            generate_synthetic_dataset, series, triplet_model)
from mollow.fitting.g2 import two_sided_exp_bin
from mollow.fitting.synthetic import DEFAULTS
from mollow.phonon import PhononParams, chi_coefficient


# --- containers -----------------------------------------------------------

def test_series_point_validation():
    with pytest.raises(ValidationError):
        SeriesPoint(math.nan, 1.0)
    with pytest.raises(ValidationError):
        SeriesPoint(1.0, 1.0, -0.5)
    with pytest.raises(ValidationError):
        series([1, 2], [1, 2, 3])


def test_report_has_error_per_param():
    rep, _ = fit_least_squares(lambda p: p - np.array([1.0, 2.0]), np.zeros(2), ["a", "b"])
    assert set(rep.std_errors) == set(rep.params)
    assert rep.converged and math.isfinite(rep.residual_norm)
    d = rep.to_dict()
    assert d["params"]["a"] == pytest.approx(1.0)


# --- linear ---------------------------------------------------------------

def test_linear_exact_kappa():
    x = np.sqrt(np.linspace(10, 800, 9))
    rep = fit_linear(series(x, 5.04 * x))
    assert rep.params["slope"] == pytest.approx(5.04, rel=1e-12)
    assert rep.params["intercept"] == pytest.approx(0.0, abs=1e-10)
    rep0 = fit_linear(series(x, 5.04 * x), through_origin=True)
    assert rep0.params["slope"] == pytest.approx(5.04, rel=1e-12)


def test_linear_two_points_interpolates():
    rep = fit_linear(series([1.0, 3.0], [2.0, 8.0]))
    assert rep.params["slope"] == pytest.approx(3.0)
    assert rep.params["intercept"] == pytest.approx(-1.0)
    assert math.isnan(rep.std_errors["slope"])


def test_linear_rejects_rank_deficient():
    with pytest.raises(ValidationError):
        fit_linear(series([2.0, 2.0, 2.0], [1.0, 2.0, 3.0]))
    with pytest.raises(ValidationError):
        fit_linear(series([0.0, 0.0], [1.0, 2.0]), through_origin=True)
    with pytest.raises(ValidationError):
        fit_linear(series([1.0], [1.0]))


def test_linear_fig3b_like_series():
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(100):
        w2 = np.linspace(500, 8000, 12)
        y0 = 2.0e-4 * w2 + 31.8
        y = y0 * (1 + 0.05 * rng.standard_normal(w2.size))
        rep = fit_linear(series(w2, y))
        hits += abs(rep.params["slope"] - 2.0e-4) <= 2 * rep.std_errors["slope"]
    assert hits >= 90


@given(scale=st.floats(0.01, 100))
def test_linear_relative_weights_scale_free(scale):
    rng = np.random.default_rng(0)
    x = np.linspace(0, 10, 15)
    y = 2 * x + 1 + rng.standard_normal(15)
    err = 0.5 + rng.random(15)
    a = fit_linear(series(x, y, err))
    b = fit_linear(series(x, y, err * scale))
    assert b.params["slope"] == pytest.approx(a.params["slope"], rel=1e-9)
    assert b.std_errors["slope"] == pytest.approx(a.std_errors["slope"], rel=1e-9)


def test_std_error_scales_as_inverse_sqrt_n():
    rng = np.random.default_rng(11)

    def mean_se(n):
        out = []
        for _ in range(200):
            x = np.linspace(0, 1, n)
            out.append(fit_linear(series(x, 3 * x + rng.normal(0, 0.1, n))).std_errors["slope"])
        return np.mean(out)

    ratio = mean_se(50) / mean_se(200)
    assert 2 / 1.5 <= ratio <= 2 * 1.5


# --- alpha from chi(T) ----------------------------------------------------

def _chi_series(alpha, T=np.arange(5.0, 36.0, 5.0)):
    return T, np.array([chi_coefficient(PhononParams(alpha, 4.34, t)) for t in T])


def test_alpha_round_trip():
    T, chi = _chi_series(0.077)
    assert extract_alpha_from_temperature(series(T, chi)).params["alpha"] == pytest.approx(0.077, rel=1e-6)
    T, chi = _chi_series(0.0)
    assert extract_alpha_from_temperature(series(T, chi)).params["alpha"] == 0.0


def test_alpha_negative_warns_and_validates():
    rep = extract_alpha_from_temperature(series([5, 10, 15], [-1e-4, -2e-4, -3e-4]))
    assert rep.params["alpha"] < 0 and rep.warnings
    with pytest.raises(ValidationError):
        extract_alpha_from_temperature(series([5, 5], [1e-4, 1e-4]))


# --- spectra --------------------------------------------------------------

def test_spectrum_noiseless_round_trip():
    truth = DEFAULTS["spectrum"]
    data = generate_synthetic_dataset("spectrum")
    rep = fit_mollow_spectrum(data[:, 0], data[:, 1])
    assert rep.converged
    for k, v in truth.items():
        if v == 0:
            assert abs(rep.params[k]) < 1e-6 * truth["area_central"]
        else:
            assert rep.params[k] == pytest.approx(v, rel=1e-6)


def test_spectrum_noisy_recovery():
    truth = DEFAULTS["spectrum"]
    for seed in range(5):
        data = generate_synthetic_dataset("spectrum", noise=0.01, seed=seed)
        rep = fit_mollow_spectrum(data[:, 0], data[:, 1])
        for k in ("rabi", "fwhm_red", "fwhm_blue", "area_red", "area_blue", "fwhm_central"):
            assert rep.params[k] == pytest.approx(truth[k], rel=0.03), (seed, k)


def test_spectrum_asymmetric_and_shifted():
    truth = dict(DEFAULTS["spectrum"], center=7.5, rabi=90.0, area_red=1.4, baseline=0.01)
    data = generate_synthetic_dataset("spectrum", truth=truth)
    rep = fit_mollow_spectrum(data[:, 0], data[:, 1])
    for k, v in truth.items():
        assert rep.params[k] == pytest.approx(v, rel=1e-6)


def test_spectrum_flat_data_never_a_triplet():
    x = np.linspace(-250, 250, 501)
    rep = fit_mollow_spectrum(x, np.full_like(x, 3.0))
    assert not rep.converged
    assert rep.params["area_red"] == rep.params["area_blue"] == 0.0
    rng = np.random.default_rng(1)
    noisy = fit_mollow_spectrum(x, 3.0 + 0.01 * rng.standard_normal(x.size))
    assert not noisy.converged or noisy.params["area_red"] < 3 * noisy.std_errors["area_red"]


def test_spectrum_degenerate_start_rejected():
    x = np.linspace(-250, 250, 501)
    # single Gaussian, nothing outside the central line
    y = np.exp(-x**2 / (2 * 80.0**2))
    with pytest.raises(ValidationError):
        fit_mollow_spectrum(x, y)
    with pytest.raises(ValidationError):
        fit_mollow_spectrum(x[:20], y[:20])


# --- Rabi curve -----------------------------------------------------------

def test_rabi_lossless_round_trip():
    truth = dict(DEFAULTS["rabi-curve"], scale=0.37, amplitude=812.0, alpha=0.0, gamma0=0.0)
    x = np.linspace(0, 5 * math.pi / 0.37, 40)
    data = generate_synthetic_dataset("rabi-curve", truth=truth, grid=x)
    rep = fit_rabi_curve(series(data[:, 0], data[:, 1]), gamma0=0.0,
                         vary=("scale",), fixed={"alpha": 0.0})
    assert rep.params["scale"] == pytest.approx(0.37, rel=1e-6)
    assert rep.params["amplitude"] == pytest.approx(812.0, rel=1e-6)


def test_rabi_default_round_trip():
    data = generate_synthetic_dataset("rabi-curve")
    rep = fit_rabi_curve(series(data[:, 0], data[:, 1]))
    t = DEFAULTS["rabi-curve"]
    for k in ("scale", "amplitude", "alpha", "omega_c"):
        assert rep.params[k] == pytest.approx(t[k], rel=1e-6), k
    assert rep.std_errors["gamma0"] == 0.0


def test_rabi_alpha_fixed_gamma0_free_comparable():
    data = generate_synthetic_dataset("rabi-curve", noise=0.03, seed=4)
    pts = series(data[:, 0], data[:, 1])
    free = fit_rabi_curve(pts)
    alt = fit_rabi_curve(pts, vary=("scale", "omega_c", "gamma0"), fixed={"alpha": 0.077})
    assert alt.converged
    # both residuals at the 3% noise floor
    floor = 0.03 * math.sqrt(len(pts))
    assert free.residual_norm < 1.3 * floor
    assert alt.residual_norm < 1.5 * free.residual_norm


def test_rabi_bounds_and_validation():
    data = generate_synthetic_dataset("rabi-curve")
    pts = series(data[:, 0], data[:, 1])
    with pytest.raises(ValidationError):
        fit_rabi_curve(pts[:5])
    with pytest.raises(ValidationError):
        fit_rabi_curve(pts, vary=("scale", "bogus"))
    rep = fit_rabi_curve(pts, init={"alpha": 0.9, "omega_c": 19.0}, n_starts=2)
    assert 0 <= rep.params["alpha"] <= 1 and 0.5 <= rep.params["omega_c"] <= 20


# --- g2 -------------------------------------------------------------------

PERIOD = 1e3 / 82.0


def test_two_sided_exp_bin_integrates_to_area():
    edges = np.linspace(-20, 20, 4001)
    val = two_sided_exp_bin(edges[:-1], edges[1:], 0.3, 0.561, 123.0).sum()
    assert val == pytest.approx(123.0, rel=1e-12)


def test_g2_noiseless_round_trip_short_lifetime():
    data = generate_synthetic_dataset("g2-histogram", truth={"T1": 300.0})
    rep = g2_from_histogram(data[:, 0], data[:, 1], PERIOD)
    assert rep.params["g2_0"] == pytest.approx(0.39, rel=1e-6)
    assert rep.params["T1"] == pytest.approx(300.0, rel=1e-6)


def test_g2_noiseless_long_lifetime():
    data = generate_synthetic_dataset("g2-histogram")
    rep = g2_from_histogram(data[:, 0], data[:, 1], PERIOD)
    assert rep.params["T1"] == pytest.approx(561.0, rel=1e-6)
    assert rep.params["g2_0"] == pytest.approx(0.39, abs=1e-3)


def test_g2_uncorrelated_and_empty_centre():
    data = generate_synthetic_dataset("g2-histogram", truth={"g2_0": 1.0, "T1": 200.0})
    assert g2_from_histogram(data[:, 0], data[:, 1], PERIOD).params["g2_0"] == pytest.approx(1.0, rel=1e-9)
    d = generate_synthetic_dataset("g2-histogram", truth={"T1": 200.0})
    c = d[:, 1].copy()
    c[np.abs(d[:, 0]) < PERIOD / 2] = 0.0
    assert g2_from_histogram(d[:, 0], c, PERIOD).params["g2_0"] == 0.0


def test_g2_needs_three_side_peaks():
    d = generate_synthetic_dataset("g2-histogram", truth={"n_side": 1})
    with pytest.raises(ValidationError):
        g2_from_histogram(d[:, 0], d[:, 1], PERIOD)
    with pytest.raises(ValidationError):
        g2_from_histogram(d[::-1, 0], d[:, 1], PERIOD)


def test_g2_background_correction():
    assert correct_g2_background(0.39, math.sqrt(0.782)) == pytest.approx(0.22, abs=0.005)
    assert correct_g2_background(0.5, 1.0) == 0.5
    assert correct_g2_background(1.0, 0.3) == pytest.approx(1.0)
    with pytest.warns(RuntimeWarning):
        assert correct_g2_background(0.05, 0.5) == 0.0
    for bad in (0.0, 1.5):
        with pytest.raises(ValidationError):
            correct_g2_background(0.4, bad)


@given(g=st.floats(0, 2), rho=st.floats(0.1, 1))
def test_g2_correction_properties(g, rho):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = correct_g2_background(g, rho)
        # pushes away from the Poissonian value 1, and is monotone in g
        assert out >= 0
        if out > 0:
            assert (out - 1) * (g - 1) >= -1e-12
            assert abs(out - 1) >= abs(g - 1) - 1e-12
        assert correct_g2_background(g + 0.1, rho) >= out


# --- synthetic ------------------------------------------------------------

@pytest.mark.parametrize("kind", ["spectrum", "power-series", "temperature-series",
                                  "rabi-curve", "g2-histogram"])
def test_synthetic_deterministic(kind):
    a = generate_synthetic_dataset(kind, noise=0.05, seed=9)
    b = generate_synthetic_dataset(kind, noise=0.05, seed=9)
    c = generate_synthetic_dataset(kind, noise=0.05, seed=10)
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()


def test_synthetic_zero_noise_is_model():
    d = generate_synthetic_dataset("spectrum")
    assert np.array_equal(d[:, 1], triplet_model(d[:, 0], **DEFAULTS["spectrum"]))
    p = generate_synthetic_dataset("power-series")
    assert np.allclose(p[:, 1], 5.04 * np.sqrt(p[:, 0]))
    assert np.allclose(p[:, 2], 31.76 + 2e-4 * p[:, 1] ** 2)
    with pytest.raises(ValidationError):
        generate_synthetic_dataset("nope")
    with pytest.raises(ValidationError):
        generate_synthetic_dataset("spectrum", truth={"bogus": 1})
