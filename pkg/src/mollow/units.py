"""Physical constants and unit conversions.

Internally every rate and angular frequency is in ps^-1 and every time in ps.
Energies enter and leave the library in ueV, temperatures in K and laser
powers in uW; conversion happens only through the helpers below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 658.2119569  # ueV ps
    kB: float = 86.17333262  # ueV / K


UNITS = UnitSystem()
HBAR = UNITS.hbar
KB = UNITS.kB


@dataclass(frozen=True)
class EmitterParams:
    """Bare emitter properties.

    T1 is the radiative lifetime in ps, gamma0 the non-phonon dephasing in ueV
    and kappa the effective dipole coefficient in ueV/sqrt(uW). kappa may be
    negative (only its magnitude enters predictions).
    """

    T1: float
    gamma0: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not self.T1 > 0:
            raise ValidationError(f"T1 must be positive, got {self.T1}")
        if not self.gamma0 >= 0:
            raise ValidationError(f"gamma0 must be non-negative, got {self.gamma0}")
        if not math.isfinite(self.kappa):
            raise ValidationError("kappa must be finite")

    @property
    def gamma1(self) -> float:
        """Radiative decay rate in ps^-1."""
        return 1.0 / self.T1

    @property
    def gamma0_rate(self) -> float:
        return to_angular_frequency(self.gamma0)


def to_angular_frequency(E):
    """ueV -> ps^-1."""
    return E / HBAR


def to_energy(omega):
    """ps^-1 -> ueV."""
    return omega * HBAR


def thermal_energy(T):
    """k_B T in ueV for a temperature in K."""
    if T < 0:
        raise ValidationError(f"temperature must be non-negative, got {T}")
    return KB * T


def thermal_rate(T):
    """k_B T / hbar in ps^-1."""
    return to_angular_frequency(thermal_energy(T))


def rabi_from_power(P, kappa):
    """Renormalized Rabi energy |kappa| sqrt(P) in ueV, for P in uW."""
    if P < 0:
        raise ValidationError(f"laser power must be non-negative, got {P}")
    return abs(kappa) * math.sqrt(P)
