"""Fit report container and the shared nonlinear least-squares driver."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from ..errors import ValidationError

FTOL = 1e-10
MAX_ITER = 500


@dataclass
class FitReport:
    params: dict
    std_errors: dict
    residual_norm: float
    converged: bool
    iterations: int
    warnings: list = field(default_factory=list)

    def __getitem__(self, name):
        return self.params[name]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SeriesPoint:
    x: float
    y: float
    y_err: Optional[float] = None

    def __post_init__(self):
        vals = [self.x, self.y] + ([self.y_err] if self.y_err is not None else [])
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"non-finite series point {self}")
        if self.y_err is not None and self.y_err <= 0:
            raise ValidationError("y_err must be positive")


def series(x, y, y_err=None) -> list[SeriesPoint]:
    """Build SeriesPoints from parallel arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValidationError("x and y must have the same length")
    if y_err is None:
        return [SeriesPoint(float(a), float(b)) for a, b in zip(x, y)]
    e = np.broadcast_to(np.asarray(y_err, dtype=float), x.shape)
    return [SeriesPoint(float(a), float(b), float(c)) for a, b, c in zip(x, y, e)]


def unpack(points: Sequence[SeriesPoint]):
    x = np.array([p.x for p in points], dtype=float)
    y = np.array([p.y for p in points], dtype=float)
    errs = [p.y_err for p in points]
    if all(e is None for e in errs):
        return x, y, None
    if any(e is None for e in errs):
        raise ValidationError("y_err must be given for all points or none")
    return x, y, np.array(errs, dtype=float)


def covariance(jac: np.ndarray, cost2: float, dof: int, absolute_sigma: bool) -> np.ndarray:
    """Parameter covariance from the Jacobian of the (weighted) residuals.

    Scaled by the reduced chi-square unless ``absolute_sigma``.
    """
    JTJ = jac.T @ jac
    try:
        cov = np.linalg.inv(JTJ)
        if not np.all(np.isfinite(cov)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(JTJ)
        singular = np.abs(np.diag(JTJ)) < 1e-300
        cov[singular, :] = np.inf
        cov[:, singular] = np.inf
    if not absolute_sigma:
        cov = cov * (cost2 / dof if dof > 0 else np.nan)
    return cov


def std_from_cov(cov: np.ndarray) -> np.ndarray:
    d = np.diag(cov).copy()
    with np.errstate(invalid="ignore"):
        return np.where(d >= 0, np.sqrt(np.abs(d)), np.nan)


def fit_least_squares(residuals: Callable[[np.ndarray], np.ndarray],
                      x0: Sequence[float],
                      names: Sequence[str],
                      bounds=(-np.inf, np.inf),
                      n_starts: int = 5,
                      jitter: float = 0.2,
                      seed: int = 0,
                      absolute_sigma: bool = False,
                      diff_step=None,
                      x_scale="jac",
                      max_iter: int = MAX_ITER) -> tuple[FitReport, object]:
    """Multi-start trust-region least squares.

    The first start is ``x0`` itself; the others are multiplicatively jittered
    copies drawn from a generator seeded with ``seed``. Returns the report for
    the lowest-cost solution together with the raw scipy result.
    """
    x0 = np.asarray(x0, dtype=float)
    lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), x0.shape) for b in bounds)
    rng = np.random.default_rng(seed)
    starts = [x0]
    for _ in range(max(0, n_starts - 1)):
        starts.append(x0 * (1.0 + jitter * rng.standard_normal(x0.size)))
    best = None
    total_nfev = 0
    for s in starts:
        s = np.clip(s, lo, hi)
        # strictly interior start, required by the trust-region solver
        with np.errstate(invalid="ignore"):
            s = np.where(np.isfinite(lo) & (s <= lo), lo + 1e-9 * (np.abs(lo) + 1), s)
            s = np.where(np.isfinite(hi) & (s >= hi), hi - 1e-9 * (np.abs(hi) + 1), s)
        try:
            res = least_squares(residuals, s, bounds=(lo, hi), method="trf",
                                ftol=FTOL, xtol=FTOL, gtol=FTOL, x_scale=x_scale,
                                diff_step=diff_step, max_nfev=max_iter)
        except ValueError:
            continue
        total_nfev += res.nfev
        if not np.all(np.isfinite(res.fun)):
            continue
        if best is None or res.cost < best.cost:
            best = res
    if best is None:
        nan = {n: math.nan for n in names}
        return FitReport(nan, dict(nan), math.inf, False, total_nfev,
                         ["all starts failed"]), None
    dof = best.fun.size - x0.size
    cost2 = float(best.fun @ best.fun)
    cov = covariance(best.jac, cost2, dof, absolute_sigma)
    err = std_from_cov(cov)
    report = FitReport(
        params={n: float(v) for n, v in zip(names, best.x)},
        std_errors={n: float(e) for n, e in zip(names, err)},
        residual_norm=math.sqrt(cost2),
        converged=bool(best.status > 0),
        iterations=int(best.nfev),
    )
    return report, best
