"""Coherent control with short resonant Gaussian pulses.

The Rabi frequency follows the pulse envelope

    W(t) = R * theta / (2 tau sqrt(pi)) * exp[-(t / 2 tau)^2],
    tau  = delta_t / (4 sqrt(ln 2)),

where delta_t is the intensity FWHM of the pulse and R the phonon
renormalization. Radiative decay is neglected (G1 = 0) on the pulse time scale
and the pure-dephasing rate follows the instantaneous Rabi frequency through
the full phonon expression.

The integrator is a compiled Dormand-Prince 5(4) with the same tolerances as
:func:`mollow.bloch.evolve`; it is much faster than a Python right-hand side,
which matters inside the Rabi-curve fits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import NumericalError, ValidationError
from .phonon import PhononParams, dephasing_rate_full, renormalization_factor
from .units import to_angular_frequency

RTOL = 1e-9
ATOL = 1e-12
# integration window in units of tau: the envelope is exp(-36) ~ 2e-16 of
# its peak at the edges
WINDOW = 12.0


@dataclass(frozen=True)
class PulseParams:
    theta: float = math.pi  # rad
    delta_t: float = 1.2  # ps, intensity FWHM
    rep_rate: float = 82.0  # MHz, not used by the dynamics

    def __post_init__(self):
        if not self.theta >= 0:
            raise ValidationError(f"pulse area must be >= 0, got {self.theta}")
        if not self.delta_t > 0:
            raise ValidationError(f"pulse length must be > 0, got {self.delta_t}")
        if not self.rep_rate > 0:
            raise ValidationError("repetition rate must be > 0")

    @property
    def tau(self) -> float:
        return self.delta_t / (4.0 * math.sqrt(math.log(2.0)))

    @property
    def rep_period_ns(self) -> float:
        return 1e3 / self.rep_rate


def pulse_envelope(p: PulseParams, R: float, t):
    """Instantaneous renormalized Rabi frequency (ps^-1) at time(s) t (ps)."""
    if not 0 < R <= 1:
        raise ValidationError(f"renormalization factor must be in (0, 1], got {R}")
    tau = p.tau
    env = R * p.theta / (2 * tau * math.sqrt(math.pi)) * np.exp(-(np.asarray(t) / (2 * tau)) ** 2)
    return env.item() if np.ndim(env) == 0 else env


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)


@numba.njit(cache=True)
def _rhs(t, y, amp, tau, alpha, wc, kT, g0, out):
    w = amp * math.exp(-(t / (2.0 * tau)) ** 2)
    gpd = 0.0
    if w > 0.0 and alpha > 0.0:
        x = w / (2.0 * kT)
        if x < 1e-8:
            wcoth = 2.0 * kT
        else:
            wcoth = w / math.tanh(x)
        gpd = 0.5 * math.pi * alpha * w * w * math.exp(-(w / wc) ** 2) * wcoth
    g2 = g0 + gpd
    out[0] = -g2 * y[0]
    out[1] = -g2 * y[1] - w * y[2]
    out[2] = w * y[1]


@numba.njit(cache=True)
def _final_az(amp, tau, alpha, wc, kT, g0, window, rtol, atol):
    t = -window * tau
    tend = window * tau
    y = np.array([0.0, 0.0, -1.0])
    k1 = np.empty(3)
    k2 = np.empty(3)
    k3 = np.empty(3)
    k4 = np.empty(3)
    k5 = np.empty(3)
    k6 = np.empty(3)
    k7 = np.empty(3)
    yt = np.empty(3)
    yn = np.empty(3)
    if amp == 0.0:
        return -1.0, t
    _rhs(t, y, amp, tau, alpha, wc, kT, g0, k1)
    h = 0.01 * tau
    hmin = 1e-14 * tau
    while t < tend:
        if t + h > tend:
            h = tend - t
        for i in range(3):
            yt[i] = y[i] + h * _A21 * k1[i]
        _rhs(t + _C2 * h, yt, amp, tau, alpha, wc, kT, g0, k2)
        for i in range(3):
            yt[i] = y[i] + h * (_A31 * k1[i] + _A32 * k2[i])
        _rhs(t + _C3 * h, yt, amp, tau, alpha, wc, kT, g0, k3)
        for i in range(3):
            yt[i] = y[i] + h * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _rhs(t + _C4 * h, yt, amp, tau, alpha, wc, kT, g0, k4)
        for i in range(3):
            yt[i] = y[i] + h * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _rhs(t + _C5 * h, yt, amp, tau, alpha, wc, kT, g0, k5)
        for i in range(3):
            yt[i] = y[i] + h * (_A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i]
                                + _A64 * k4[i] + _A65 * k5[i])
        _rhs(t + h, yt, amp, tau, alpha, wc, kT, g0, k6)
        for i in range(3):
            yn[i] = y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i]
                                + _B5 * k5[i] + _B6 * k6[i])
        _rhs(t + h, yn, amp, tau, alpha, wc, kT, g0, k7)
        err = 0.0
        for i in range(3):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(y[i]), abs(yn[i]))
            err += (e / sc) ** 2
        err = math.sqrt(err / 3.0)
        if err <= 1.0:
            t += h
            for i in range(3):
                y[i] = yn[i]
                k1[i] = k7[i]
            fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= fac
        if h < hmin and t < tend:
            return math.nan, t
    return y[2], t


@numba.njit(cache=True)
def _final_az_batch(amps, tau, alpha, wc, kT, g0, window, rtol, atol, out, fail_t):
    for j in range(amps.size):
        out[j], fail_t[j] = _final_az(amps[j], tau, alpha, wc, kT, g0, window, rtol, atol)


def final_populations(thetas, ph: PhononParams, gamma0: float, delta_t: float = 1.2,
                      rtol: float = RTOL, atol: float = ATOL,
                      renormalize: bool = True) -> np.ndarray:
    """Final excited-state populations for an array of pulse areas.

    ``gamma0`` is in ueV. R is evaluated once for the whole batch.
    """
    thetas = np.ascontiguousarray(thetas, dtype=float)
    if np.any(thetas < 0) or not np.all(np.isfinite(thetas)):
        raise ValidationError("pulse areas must be finite and >= 0")
    if gamma0 < 0:
        raise ValidationError("gamma0 must be >= 0")
    tau = PulseParams(delta_t=delta_t).tau
    R = renormalization_factor(ph) if renormalize else 1.0
    amps = R * thetas / (2 * tau * math.sqrt(math.pi))
    az = np.empty(thetas.size)
    fail_t = np.empty(thetas.size)
    _final_az_batch(amps.ravel(), tau, ph.alpha, ph.omega_c, ph.kT,
                    to_angular_frequency(gamma0), WINDOW, rtol, atol, az, fail_t)
    bad = ~np.isfinite(az)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise NumericalError(
            f"step size underflow at t = {fail_t[j]:g} ps (theta = {thetas.ravel()[j]:g})")
    return np.clip(0.5 * (1.0 + az), 0.0, 1.0).reshape(thetas.shape)


def simulate_pulse(p: PulseParams, ph: PhononParams, gamma0: float,
                   rtol: float = RTOL, atol: float = ATOL) -> float:
    """Excited-state population left behind by one pulse, starting in |g>."""
    return float(final_populations(np.array([p.theta]), ph, gamma0, p.delta_t,
                                   rtol=rtol, atol=atol)[0])


def rabi_curve(theta_grid, ph: PhononParams, gamma0: float,
               p: PulseParams = PulseParams()) -> np.ndarray:
    """Rows of (theta, final population) for a grid of pulse areas."""
    th = np.asarray(theta_grid, dtype=float)
    if th.ndim != 1:
        raise ValidationError("theta grid must be one-dimensional")
    if th.size > 1 and np.any(np.diff(th) < 0):
        raise ValidationError("theta grid must be increasing")
    pops = final_populations(th, ph, gamma0, p.delta_t)
    return np.column_stack([th, pops])


def gamma_pd_instantaneous(ph: PhononParams):
    """Callable W -> gamma_PD(W) (full expression) for :func:`mollow.bloch.evolve`."""
    return lambda w: dephasing_rate_full(w, ph)
