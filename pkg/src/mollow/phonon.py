"""LA-phonon bath: spectral density, Rabi renormalization and pure dephasing.

All frequencies are angular frequencies in ps^-1, the coupling strength
alpha is in ps^2 and the temperature in K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalError, ValidationError
from .units import HBAR, KB, thermal_rate

# integrand cutoff in units of omega_c; exp(-144) is far below double epsilon
CUTOFF_MULTIPLE = 12.0
QUAD_EPSABS = 1e-10


@dataclass(frozen=True)
class PhononParams:
    alpha: float  # ps^2
    omega_c: float  # ps^-1
    temperature: float  # K

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        if not self.omega_c > 0:
            raise ValidationError(f"omega_c must be > 0, got {self.omega_c}")
        if not self.temperature > 0:
            raise ValidationError(
                f"temperature must be > 0 K, got {self.temperature}")

    @property
    def kT(self) -> float:
        """Thermal energy as an angular frequency (ps^-1)."""
        return thermal_rate(self.temperature)


def spectral_density(omega, p: PhononParams):
    """J(omega) = alpha omega^3 exp[-(omega/omega_c)^2]."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValidationError("spectral density is defined for omega >= 0")
    J = p.alpha * omega**3 * np.exp(-(omega / p.omega_c) ** 2)
    return J.item() if J.ndim == 0 else J


def _omega_coth(omega, kT):
    # omega * coth(omega / 2kT), continued to 2kT at omega = 0
    x = omega / (2.0 * kT)
    if x < 1e-8:
        return 2.0 * kT * (1.0 + x * x / 3.0)
    return omega / math.tanh(x)


def renormalization_exponent(p: PhononParams) -> float:
    """The integral 1/2 int_0^inf J(w)/w^2 coth(w/2kT) dw, so that R = exp(-it)."""
    if p.alpha == 0:
        return 0.0
    kT = p.kT
    wc = p.omega_c

    def integrand(w):
        return math.exp(-(w / wc) ** 2) * _omega_coth(w, kT)

    val, err = integrate.quad(integrand, 0.0, CUTOFF_MULTIPLE * wc,
                              epsabs=QUAD_EPSABS / p.alpha, epsrel=1e-13,
                              limit=400)
    if not math.isfinite(val) or p.alpha * err > 1e3 * QUAD_EPSABS:
        raise NumericalError(
            f"renormalization integral did not converge (error estimate {err:g})")
    return 0.5 * p.alpha * val


def renormalization_factor(p: PhononParams) -> float:
    """Phonon renormalization R of the Rabi frequency, in (0, 1]."""
    return math.exp(-renormalization_exponent(p))


def dephasing_rate_full(omega_r, p: PhononParams):
    """gamma_PD = (pi/2) J(Omega_r) coth(Omega_r / 2kT), in ps^-1.

    Works elementwise on arrays. The Omega_r -> 0 limit is 0.
    """
    w = np.asarray(omega_r, dtype=float)
    if np.any(w < 0):
        raise ValidationError("Rabi frequency must be non-negative")
    kT = p.kT
    x = w / (2.0 * kT)
    with np.errstate(divide="ignore", invalid="ignore"):
        wcoth = np.where(x < 1e-8, 2.0 * kT * (1.0 + x * x / 3.0),
                         w / np.tanh(np.where(x < 1e-8, 1.0, x)))
    rate = 0.5 * math.pi * p.alpha * w**2 * np.exp(-(w / p.omega_c) ** 2) * wcoth
    return rate.item() if rate.ndim == 0 else rate


def dephasing_rate_weak(omega_r, p: PhononParams):
    """Weak-drive limit gamma_PD = pi alpha kT Omega_r^2, in ps^-1."""
    w = np.asarray(omega_r, dtype=float)
    if np.any(w < 0):
        raise ValidationError("Rabi frequency must be non-negative")
    rate = math.pi * p.alpha * p.kT * w**2
    return rate.item() if rate.ndim == 0 else rate


def chi_coefficient(p: PhononParams) -> float:
    """Slope chi in ueV^-1 such that gamma_PD[ueV] = chi * Omega_r[ueV]^2.

    chi = pi alpha k_B T / hbar^2 with alpha in ps^2, k_B T in ueV and hbar in
    ueV ps.
    """
    return math.pi * p.alpha * KB * p.temperature / HBAR**2


def alpha_from_chi(chi: float, temperature: float) -> float:
    """Invert chi_coefficient for alpha (ps^2)."""
    return chi * HBAR**2 / (math.pi * KB * temperature)
