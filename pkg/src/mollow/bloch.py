"""Resonantly driven two-level system in the Bloch-vector picture.

State vector (ax, ay, az) = (<sx>, <sy>, <sz>) with sz = |e><e| - |g><g|.
Equations of motion

    d ax/dt = -G2 ax
    d ay/dt = -G2 ay - W az
    d az/dt = -G1 az + W ay - G1

with G1 the radiative rate, G2 = G1/2 + gamma_PD + gamma0 and W the
(renormalized) Rabi frequency, all in ps^-1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import NumericalError, ValidationError

RTOL = 1e-9
ATOL = 1e-12


@dataclass(frozen=True)
class BlochState:
    ax: float
    ay: float
    az: float

    @classmethod
    def ground(cls) -> "BlochState":
        return cls(0.0, 0.0, -1.0)

    @classmethod
    def from_array(cls, v) -> "BlochState":
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.ax, self.ay, self.az])

    @property
    def population(self) -> float:
        """Excited-state population (1 + az) / 2."""
        return 0.5 * (1.0 + self.az)

    @property
    def norm(self) -> float:
        return math.sqrt(self.ax**2 + self.ay**2 + self.az**2)

    @property
    def coherence(self) -> complex:
        """<sigma> = <|g><e|> = (ax - i ay) / 2."""
        return 0.5 * (self.ax - 1j * self.ay)


@dataclass(frozen=True)
class RateSet:
    """Rates entering the Bloch equations, all in ps^-1."""

    gamma1: float
    gamma2: float
    omega_r: float

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "omega_r"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")
        if self.gamma2 < 0.5 * self.gamma1 * (1 - 1e-12):
            raise ValidationError(
                f"gamma2 ({self.gamma2}) must be at least gamma1/2 ({self.gamma1 / 2})")

    @classmethod
    def from_components(cls, gamma1, gamma_pd, gamma0, omega_r) -> "RateSet":
        return cls(gamma1, total_dephasing(gamma1, gamma_pd, gamma0), omega_r)


def total_dephasing(gamma1, gamma_pd, gamma0):
    """G2 = G1/2 + gamma_PD + gamma0."""
    if gamma1 < 0 or gamma_pd < 0 or gamma0 < 0:
        raise ValidationError("rates must be non-negative")
    return 0.5 * gamma1 + gamma_pd + gamma0


def generator(r: RateSet) -> tuple[np.ndarray, np.ndarray]:
    """Return (M, b) with d/dt v = M v + b."""
    g1, g2, w = r.gamma1, r.gamma2, r.omega_r
    M = np.array([[-g2, 0.0, 0.0],
                  [0.0, -g2, -w],
                  [0.0, w, -g1]])
    b = np.array([0.0, 0.0, -g1])
    return M, b


def steady_state(r: RateSet) -> BlochState:
    """Closed-form fixed point of the Bloch equations."""
    g1, g2, w = r.gamma1, r.gamma2, r.omega_r
    denom = g1 * g2 + w * w
    if denom == 0.0 or g2 == 0.0:
        raise ValidationError(
            "steady state is not unique without damping (need gamma1*gamma2 + "
            "omega_r^2 > 0 and gamma2 > 0)")
    az = -g1 * g2 / denom
    ay = -w * az / g2
    return BlochState(0.0, ay, az)


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # shape (len(t), 3)

    @property
    def ax(self):
        return self.states[:, 0]

    @property
    def ay(self):
        return self.states[:, 1]

    @property
    def az(self):
        return self.states[:, 2]

    @property
    def population(self):
        return 0.5 * (1.0 + self.states[:, 2])

    @property
    def final(self) -> BlochState:
        return BlochState.from_array(self.states[-1])


def affine_propagator(M: np.ndarray, b: np.ndarray, dt: float) -> np.ndarray:
    """4x4 matrix advancing the homogeneous vector (v, 1) by dt."""
    n = M.shape[0]
    A = np.zeros((n + 1, n + 1), dtype=np.result_type(M, b))
    A[:n, :n] = M
    A[:n, n] = b
    return expm(A * dt)


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValidationError("t_grid must be a non-empty 1-D sequence")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValidationError("t_grid must be strictly increasing")
    return t


def evolve(s0: BlochState,
           drive: Union[float, Callable[[float], float]],
           gamma1: float,
           gamma_pd_of_omega: Optional[Callable[[float], float]],
           gamma0: float,
           t_grid,
           rtol: float = RTOL,
           atol: float = ATOL) -> Trajectory:
    """Integrate the Bloch equations over ``t_grid``.

    ``drive`` is either a constant Rabi frequency or a callable t -> W(t).
    ``gamma_pd_of_omega`` maps the instantaneous Rabi frequency to the phonon
    dephasing rate (Markovian treatment); ``None`` means no phonon dephasing.

    A constant drive gives a time-independent affine system that is propagated
    exactly with a matrix exponential. A time-dependent drive is integrated
    with an adaptive Runge-Kutta 4(5) scheme.
    """
    t = _check_grid(t_grid)
    v0 = s0.as_array()
    if gamma1 < 0 or gamma0 < 0:
        raise ValidationError("rates must be non-negative")

    if not callable(drive):
        w = float(drive)
        gpd = float(gamma_pd_of_omega(w)) if gamma_pd_of_omega is not None else 0.0
        M, b = generator(RateSet.from_components(gamma1, gpd, gamma0, w))
        out = np.empty((t.size, 3))
        out[0] = v0
        h = np.append(v0, 1.0)
        cache: dict[float, np.ndarray] = {}
        for i in range(1, t.size):
            dt = t[i] - t[i - 1]
            P = cache.get(dt)
            if P is None:
                P = cache[dt] = affine_propagator(M, b, dt)
            h = P @ h
            out[i] = h[:3]
        return Trajectory(t, out)

    def rhs(time, v):
        w = drive(time)
        g2 = 0.5 * gamma1 + gamma0
        if gamma_pd_of_omega is not None:
            g2 += gamma_pd_of_omega(abs(w))
        return np.array([-g2 * v[0],
                         -g2 * v[1] - w * v[2],
                         -gamma1 * v[2] + w * v[1] - gamma1])

    if t.size == 1:
        return Trajectory(t, v0[None, :].copy())
    sol = solve_ivp(rhs, (t[0], t[-1]), v0, method="RK45", t_eval=t,
                    rtol=rtol, atol=atol)
    if not sol.success:
        t_fail = sol.t[-1] if sol.t.size else t[0]
        raise NumericalError(f"integration failed at t = {t_fail:g} ps: {sol.message}")
    return Trajectory(t, sol.y.T.copy())
