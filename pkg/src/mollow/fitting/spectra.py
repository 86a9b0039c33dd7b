"""Mollow-triplet line-shape fit: two Lorentzian sidebands plus a Gaussian
central (resolution-limited laser) line on a constant baseline."""
from __future__ import annotations

import math

import numpy as np
from scipy.signal import find_peaks

from ..errors import ValidationError
from .report import FitReport, fit_least_squares

PARAM_NAMES = ("center", "rabi", "fwhm_red", "fwhm_blue", "area_red",
               "area_blue", "area_central", "fwhm_central", "baseline")
FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


def lorentzian(x, x0, fwhm, area):
    hw = 0.5 * fwhm
    return area * hw / math.pi / ((x - x0) ** 2 + hw * hw)


def gaussian(x, x0, fwhm, area):
    sigma = fwhm * FWHM_TO_SIGMA
    return area / (sigma * math.sqrt(2 * math.pi)) * np.exp(-0.5 * ((x - x0) / sigma) ** 2)


def triplet_model(x, center, rabi, fwhm_red, fwhm_blue, area_red, area_blue,
                  area_central, fwhm_central, baseline=0.0):
    """Sum of the two sideband Lorentzians, the central Gaussian and a baseline."""
    x = np.asarray(x, dtype=float)
    return (lorentzian(x, center - rabi, fwhm_red, area_red)
            + lorentzian(x, center + rabi, fwhm_blue, area_blue)
            + gaussian(x, center, fwhm_central, area_central)
            + baseline)


def _half_width(x, y, i0, level):
    # distance from i0 to the first crossing of `level` on each side
    left = i0
    while left > 0 and y[left] > level:
        left -= 1
    right = i0
    while right < y.size - 1 and y[right] > level:
        right += 1
    return 0.5 * (x[right] - x[left])


def initial_guess(x, y):
    """Heuristic starting point.

    The central line is the global maximum; sideband positions are the largest
    local maxima on either side once a band of 1.5 central FWHM around it is
    excluded.
    """
    k = 5 if y.size >= 50 else 1
    ys = np.convolve(y, np.ones(k) / k, mode="same") if k > 1 else y.copy()
    dx = float(np.median(np.diff(x)))
    base = float(np.percentile(ys, 5))
    i0 = int(np.argmax(ys))
    c = float(x[i0])
    fwhm_c = max(2 * _half_width(x, ys, i0, base + 0.5 * (ys[i0] - base)), 2 * dx)
    excl = 1.5 * fwhm_c
    peaks, _ = find_peaks(ys)
    left = [i for i in peaks if x[i] < c - excl]
    right = [i for i in peaks if x[i] > c + excl]
    if not left and not right:
        raise ValidationError(
            "degenerate initialization: no sideband maxima outside the central peak")
    il = max(left, key=lambda i: ys[i]) if left else None
    ir = max(right, key=lambda i: ys[i]) if right else None
    if il is None:
        rabi = x[ir] - c
    elif ir is None:
        rabi = c - x[il]
    else:
        rabi = 0.5 * (x[ir] - x[il])
    guesses = []
    for i in (il, ir):
        if i is None:
            guesses.append((0.3 * rabi, 0.0))
            continue
        h = ys[i] - base
        w = max(2 * _half_width(x, ys, i, base + 0.5 * h), 2 * dx)
        w = min(w, rabi)
        guesses.append((w, max(h, 0.0) * math.pi * w / 2))
    (w_r, a_r), (w_b, a_b) = guesses
    a_c = max(ys[i0] - base, 0.0) * fwhm_c * FWHM_TO_SIGMA * math.sqrt(2 * math.pi)
    return np.array([c, rabi, w_r, w_b, a_r, a_b, a_c, fwhm_c, base])


def fit_mollow_spectrum(x, y, init=None, n_starts: int = 5, seed: int = 0) -> FitReport:
    """Fit a measured or synthetic resonance-fluorescence spectrum.

    ``x`` is the detuning/energy axis (ueV), ``y`` the counts. Returns a report
    with ``rabi`` = half the sideband separation plus the red/blue sideband
    widths and areas and the central-line parameters.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("x and y must be 1-D arrays of equal length")
    if x.size < 30:
        raise ValidationError("need at least 30 points to fit a triplet")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("non-finite data")
    order = np.argsort(x)
    x, y = x[order], y[order]
    span = float(x[-1] - x[0])
    dx = float(np.median(np.diff(x)))

    scale = float(np.max(np.abs(y)))
    if scale == 0 or np.ptp(y) <= 1e-12 * scale:
        zero = dict(zip(PARAM_NAMES, [float(np.mean(x)), 0.0, 0.0, 0.0, 0.0, 0.0,
                                      0.0, 0.0, float(np.mean(y))]))
        return FitReport(zero, {k: math.nan for k in PARAM_NAMES}, 0.0, False, 0,
                         ["flat data: no spectral structure"])

    if init is None:
        p0 = initial_guess(x, y)
    elif isinstance(init, dict):
        p0 = initial_guess(x, y)
        for k, v in init.items():
            p0[PARAM_NAMES.index(k)] = v
    else:
        p0 = np.asarray(init, dtype=float)
    # work in units where the data maximum is 1
    p0 = p0.copy()
    p0[[4, 5, 6, 8]] /= scale
    yn = y / scale

    lo = np.array([x[0], dx / 2, dx / 10, dx / 10, 0, 0, 0, dx / 10, -np.inf])
    hi = np.array([x[-1], span, span, span, np.inf, np.inf, np.inf, span, np.inf])

    def residuals(p):
        return triplet_model(x, *p) - yn

    report, res = fit_least_squares(residuals, p0, PARAM_NAMES, bounds=(lo, hi),
                                    n_starts=n_starts, seed=seed)
    for k in ("area_red", "area_blue", "area_central", "baseline"):
        report.params[k] *= scale
        report.std_errors[k] *= scale
    report.residual_norm *= scale
    for k in ("area_red", "area_blue"):
        a, e = report.params[k], report.std_errors[k]
        if not (a > 3 * e):
            report.warnings.append(f"{k} not significant (no resolved sideband)")
            report.converged = False
    return report
