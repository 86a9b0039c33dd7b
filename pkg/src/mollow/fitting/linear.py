"""Straight-line regressions behind the power and temperature series."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..errors import ValidationError
from ..phonon import alpha_from_chi
from .report import FitReport, SeriesPoint, unpack


def fit_linear(points: Sequence[SeriesPoint], through_origin: bool = False,
               absolute_sigma: bool = False) -> FitReport:
    """Weighted least-squares line y = slope * x + intercept.

    Weights are 1/y_err^2 when errors are supplied. Standard errors are scaled
    by the reduced chi-square unless ``absolute_sigma`` is set; with no
    residual degrees of freedom they are NaN. ``through_origin`` pins the
    intercept to zero (as for the Rabi splitting versus sqrt(P)).
    """
    x, y, err = unpack(points)
    if x.size < (1 if through_origin else 2):
        raise ValidationError("not enough points for a linear fit")
    if not through_origin and np.unique(x).size < 2:
        raise ValidationError("rank-deficient input: need two distinct x values")
    if through_origin and np.all(x == 0):
        raise ValidationError("rank-deficient input: all x are zero")
    w = np.ones_like(x) if err is None else 1.0 / err**2
    sw = np.sqrt(w)
    A = x[:, None] if through_origin else np.column_stack([x, np.ones_like(x)])
    Aw = A * sw[:, None]
    coef, *_ = np.linalg.lstsq(Aw, y * sw, rcond=None)
    resid = (y - A @ coef) * sw
    chi2 = float(resid @ resid)
    dof = x.size - A.shape[1]
    cov = np.linalg.inv(Aw.T @ Aw)
    if err is None or not absolute_sigma:
        cov = cov * (chi2 / dof) if dof > 0 else np.full_like(cov, np.nan)
    se = np.sqrt(np.diag(cov))
    params = {"slope": float(coef[0]), "intercept": 0.0 if through_origin else float(coef[1])}
    errs = {"slope": float(se[0]), "intercept": 0.0 if through_origin else float(se[1])}
    return FitReport(params, errs, math.sqrt(chi2), True, 1)


def extract_alpha_from_temperature(points: Sequence[SeriesPoint]) -> FitReport:
    """Coupling strength alpha (ps^2) from chi(T) = pi alpha k_B T / hbar^2.

    ``points`` are (T in K, chi in ueV^-1). Supplied y_err are treated as
    absolute uncertainties of the chi values (they normally come from the
    upstream linewidth fits); without them the error is scaled by the scatter.
    """
    x, y, err = unpack(points)
    if np.unique(x).size < 2:
        raise ValidationError("need at least two distinct temperatures")
    if np.any(x <= 0):
        raise ValidationError("temperatures must be positive")
    line = fit_linear(points, through_origin=True, absolute_sigma=err is not None)
    k = line.params["slope"]
    scale = alpha_from_chi(1.0, 1.0)
    report = FitReport({"alpha": k * scale}, {"alpha": line.std_errors["slope"] * scale},
                       line.residual_norm, True, 1)
    if report.params["alpha"] < 0:
        report.warnings.append("negative fitted alpha")
    return report
