"""Fit of the pulsed Rabi curve (emission versus sqrt of laser power).

Model: intensity = amplitude * n_final(theta = scale * sqrt(P)), with the
final population from :func:`mollow.pulsed.final_populations`. The amplitude
enters linearly and is profiled out of the nonlinear search (variable
projection); its standard error comes from the full Jacobian at the optimum.
"""
from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence

import numpy as np

from ..errors import ValidationError
from ..phonon import PhononParams
from ..pulsed import PulseParams, final_populations
from .report import FitReport, SeriesPoint, covariance, fit_least_squares, std_from_cov, unpack

BOUNDS = {
    "scale": (1e-9, np.inf),
    "alpha": (0.0, 1.0),
    "omega_c": (0.5, 20.0),
    "gamma0": (0.0, 1e3),
}
DEFAULT_START = {"alpha": 0.05, "omega_c": 4.0, "gamma0": 30.0}
# relative finite-difference step; well above the integrator tolerance
DIFF_STEP = 1e-5


def rabi_model(sqrtP, scale, amplitude, alpha, omega_c, gamma0, temperature,
               delta_t=1.2):
    """Model intensity for given sqrt(P) values."""
    ph = PhononParams(alpha, omega_c, temperature)
    pops = final_populations(scale * np.asarray(sqrtP, dtype=float), ph, gamma0, delta_t)
    return amplitude * pops


def _first_maximum(x, y):
    k = 3 if y.size >= 15 else 1
    ys = np.convolve(y, np.ones(k) / k, mode="same") if k > 1 else y
    # first local maximum above half the global maximum
    thresh = 0.5 * np.max(ys)
    for i in range(1, ys.size - 1):
        if ys[i] >= thresh and ys[i] >= ys[i - 1] and ys[i] >= ys[i + 1]:
            return x[i]
    return x[int(np.argmax(ys))]


def initial_scale(x, y, alpha, omega_c, gamma0, temperature, delta_t) -> float:
    """Starting scale: align the first data maximum with the model's first maximum."""
    ph = PhononParams(alpha, omega_c, temperature)
    th = np.linspace(0.0, 2.5 * math.pi, 501)
    pops = final_populations(th, ph, gamma0, delta_t)
    i = 1
    while i < th.size - 1 and not (pops[i] >= pops[i - 1] and pops[i] >= pops[i + 1]):
        i += 1
    xm = _first_maximum(x, y)
    if xm <= 0:
        raise ValidationError("cannot locate the first Rabi maximum in the data")
    return th[i] / xm


def fit_rabi_curve(points: Sequence[SeriesPoint], gamma0: float = 30.0,
                   pulse: PulseParams = PulseParams(), temperature: float = 5.8,
                   vary: Sequence[str] = ("scale", "alpha", "omega_c"),
                   fixed: Optional[Mapping[str, float]] = None,
                   init: Optional[Mapping[str, float]] = None,
                   n_starts: int = 5, seed: int = 0) -> FitReport:
    """Least-squares fit of (sqrt(P), intensity) data to the pulsed model.

    By default the scale factor between sqrt(P) and the pulse area, the
    amplitude, alpha (ps^2) and omega_c (ps^-1) vary while gamma0 (ueV) is held
    fixed. Any of scale/alpha/omega_c/gamma0 can be moved between ``vary`` and
    ``fixed``.
    """
    x, y, err = unpack(points)
    if x.size < 10:
        raise ValidationError("need at least 10 points for a Rabi-curve fit")
    if np.any(x < 0):
        raise ValidationError("sqrt(P) must be non-negative")
    vary = tuple(vary)
    unknown = set(vary) - set(BOUNDS)
    if unknown:
        raise ValidationError(f"cannot vary {sorted(unknown)}")
    values = dict(DEFAULT_START, gamma0=gamma0)
    values.update(fixed or {})
    values.update(init or {})
    if "scale" not in values:
        values["scale"] = initial_scale(x, y, values["alpha"], values["omega_c"],
                                        values["gamma0"], temperature, pulse.delta_t)
    w = np.ones_like(y) if err is None else 1.0 / err

    def populations(p):
        v = dict(values)
        v.update(zip(vary, p))
        ph = PhononParams(v["alpha"], v["omega_c"], temperature)
        return final_populations(v["scale"] * x, ph, v["gamma0"], pulse.delta_t)

    def profiled(p):
        f = populations(p) * w
        yw = y * w
        ff = f @ f
        amp = (f @ yw) / ff if ff > 0 else 0.0
        return amp * f - yw

    p0 = np.array([values[k] for k in vary])
    lo = np.array([BOUNDS[k][0] for k in vary])
    hi = np.array([BOUNDS[k][1] for k in vary])
    report, res = fit_least_squares(profiled, p0, vary, bounds=(lo, hi),
                                    n_starts=n_starts, seed=seed,
                                    absolute_sigma=err is not None,
                                    diff_step=DIFF_STEP)
    if res is None:
        report.params["amplitude"] = math.nan
        report.std_errors["amplitude"] = math.nan
        return report

    # amplitude and full covariance at the optimum
    f = populations(res.x)
    fw = f * w
    amp = float((fw @ (y * w)) / (fw @ fw)) if fw @ fw > 0 else 0.0
    cols = [fw]
    for j, k in enumerate(vary):
        h = DIFF_STEP * max(abs(res.x[j]), 1e-3)
        pj = res.x.copy()
        if pj[j] + h > hi[j]:
            h = -h
        pj[j] += h
        cols.append(amp * (populations(pj) - f) * w / h)
    J = np.column_stack(cols)
    r = amp * fw - y * w
    cost2 = float(r @ r)
    cov = covariance(J, cost2, y.size - J.shape[1], absolute_sigma=err is not None)
    se = std_from_cov(cov)
    names = ("amplitude",) + vary
    report.params = {"amplitude": amp, **{k: float(v) for k, v in zip(vary, res.x)}}
    report.std_errors = {n: float(e) for n, e in zip(names, se)}
    for k, v in values.items():
        if k not in report.params and k in BOUNDS:
            report.params[k] = float(v)
            report.std_errors[k] = 0.0
    report.residual_norm = math.sqrt(cost2)
    return report
