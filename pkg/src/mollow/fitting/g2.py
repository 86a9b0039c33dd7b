"""Pulsed Hanbury Brown-Twiss histogram analysis."""
from __future__ import annotations

import math
import warnings

import numpy as np

from ..errors import ValidationError
from .report import FitReport, fit_least_squares

IRLS_PASSES = 30
IRLS_TOL = 1e-10


def two_sided_exp_bin(lo, hi, center, T1, area):
    """Counts of area * exp(-|t - center| / T1) / (2 T1) integrated over [lo, hi)."""

    def cdf(t):
        u = (t - center) / T1
        return np.where(u < 0, 0.5 * np.exp(np.minimum(u, 0.0)),
                        1.0 - 0.5 * np.exp(-np.maximum(u, 0.0)))

    return area * (cdf(hi) - cdf(lo))


def _bin_edges(delays):
    width = float(np.median(np.diff(delays)))
    return delays - 0.5 * width, delays + 0.5 * width, width


def peak_areas(delays, counts, rep_period):
    """Counts in windows of one repetition period centred on n * rep_period.

    Returns {n: area} for every window lying completely inside the histogram.
    """
    lo_edge, hi_edge, width = _bin_edges(delays)
    first, last = lo_edge[0], hi_edge[-1]
    n_min = math.ceil((first + 0.5 * rep_period) / rep_period - 1e-9)
    n_max = math.floor((last - 0.5 * rep_period) / rep_period + 1e-9)
    areas = {}
    for n in range(n_min, n_max + 1):
        sel = (delays >= (n - 0.5) * rep_period) & (delays < (n + 0.5) * rep_period)
        areas[n] = float(np.sum(counts[sel]))
    return areas


def g2_from_histogram(delays_ns, counts, rep_period: float) -> FitReport:
    """g2(0) from peak-area ratios and T1 from the side-peak shapes.

    ``delays_ns`` are bin centres (ns), ``rep_period`` the laser period (ns).
    g2(0) is the central-window area divided by the mean side-window area; T1
    (reported in ps) comes from a Poisson-weighted fit of bin-integrated
    two-sided exponentials (Poisson likelihood), one amplitude per side peak
    plus a flat background.
    """
    delays = np.asarray(delays_ns, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if delays.shape != counts.shape or delays.ndim != 1 or delays.size < 3:
        raise ValidationError("delays and counts must be equal-length 1-D arrays")
    if not rep_period > 0:
        raise ValidationError("repetition period must be positive")
    if np.any(np.diff(delays) <= 0):
        raise ValidationError("delays must be strictly increasing")
    if np.any(counts < 0) or not np.all(np.isfinite(counts)):
        raise ValidationError("counts must be finite and non-negative")

    areas = peak_areas(delays, counts, rep_period)
    side = {n: a for n, a in areas.items() if n != 0}
    if 0 not in areas or len(side) < 3:
        raise ValidationError(
            f"need the central window and at least 3 side peaks, found {len(side)}")
    a0 = areas[0]
    side_vals = np.array(list(side.values()))
    mean_side = float(side_vals.mean())
    if mean_side <= 0:
        raise ValidationError("side peaks are empty")
    g2 = a0 / mean_side
    # Poisson counting errors
    var_mean = float(side_vals.sum()) / side_vals.size**2
    g2_err = math.sqrt(a0 / mean_side**2 + a0**2 * var_mean / mean_side**4)

    lo_edge, hi_edge, width = _bin_edges(delays)
    ns = sorted(side)
    sel = np.zeros(delays.size, dtype=bool)
    for n in ns:
        sel |= (delays >= (n - 0.5) * rep_period) & (delays < (n + 0.5) * rep_period)
    lo, hi, c = lo_edge[sel], hi_edge[sel], counts[sel]
    centers = np.array(ns, dtype=float) * rep_period

    # crude T1 start from the decay of the summed side-peak profile
    rel = np.concatenate([delays[sel & (np.abs(delays - n * rep_period) < 0.5 * rep_period)]
                          - n * rep_period for n in ns])
    t1_0 = max(float(np.sum(np.abs(rel) * c) / max(c.sum(), 1.0)), 2 * width)

    def model(p):
        T1, bg = p[0], p[1]
        # central-peak tails reach into the neighbouring windows; a0 is the
        # in-window part of that peak
        a0_full = a0 / -math.expm1(-0.5 * rep_period / T1)
        m = bg * width + two_sided_exp_bin(lo, hi, 0.0, T1, a0_full)
        for k, n0 in enumerate(centers):
            m += two_sided_exp_bin(lo, hi, n0, T1, p[2 + k])
        return m

    p = np.concatenate([[t1_0, max(float(np.percentile(c, 5)) / width, 0.0)],
                        [side[n] for n in ns]])
    lo_b = np.concatenate([[width / 20, 0.0], np.zeros(len(ns))])
    hi_b = np.concatenate([[rep_period, np.inf], np.full(len(ns), np.inf)])
    names = ["T1", "background"] + [f"area_{n}" for n in ns]
    # Poisson maximum likelihood by iterative reweighting: weights 1/m are
    # frozen within a pass, and at the fixed point the weighted normal
    # equations coincide with the Poisson score equations
    floor = 1e-6 * max(float(c.max()), 1.0)
    settled = False
    for _ in range(IRLS_PASSES):
        sd = np.sqrt(np.maximum(model(p), floor))
        fit, res = fit_least_squares(lambda q: (model(q) - c) / sd, p, names,
                                     bounds=(lo_b, hi_b), n_starts=1, absolute_sigma=True)
        if res is None:
            break
        m_old, p = sd**2, res.x
        if np.max(np.abs(model(p) - m_old)) < IRLS_TOL * max(float(m_old.max()), 1.0):
            settled = True
            break
    if not settled:
        fit.warnings.append("reweighting did not settle")
    report = FitReport(
        params={"g2_0": g2, "T1": fit.params["T1"] * 1e3,
                "central_area": a0, "mean_side_area": mean_side},
        std_errors={"g2_0": g2_err, "T1": fit.std_errors["T1"] * 1e3,
                    "central_area": math.sqrt(a0), "mean_side_area": math.sqrt(var_mean)},
        residual_norm=fit.residual_norm,
        converged=fit.converged and settled,
        warnings=list(fit.warnings),
        iterations=fit.iterations,
    )
    return report


def correct_g2_background(g2_meas: float, rho: float) -> float:
    """Remove uncorrelated background: (g2 - (1 - rho^2)) / rho^2.

    ``rho`` is the signal fraction S / (S + B). Negative results are clamped to 0.
    """
    if not 0 < rho <= 1:
        raise ValidationError(f"signal fraction must be in (0, 1], got {rho}")
    if g2_meas < 0:
        raise ValidationError("g2 must be non-negative")
    r2 = rho * rho
    g = (g2_meas - (1.0 - r2)) / r2
    if g < 0:
        warnings.warn("background-corrected g2 is negative; clamped to 0",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    return g
