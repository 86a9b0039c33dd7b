"""Parameter sweeps producing the model curves behind the power and
temperature series.

Points are evaluated by a thread pool; ``Executor.map`` returns results in
submission order, so output rows follow the grid order for any thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bloch import RateSet
from .errors import ValidationError
from .phonon import PhononParams, chi_coefficient, renormalization_factor
from .spectrum import incoherent_spectrum
from .units import EmitterParams, HBAR, rabi_from_power, to_angular_frequency


@dataclass
class SweepResult:
    schema: str  # key into mollow.io.SCHEMAS
    rows: list


def _map(fn: Callable, values: Sequence, threads: int) -> list:
    if threads < 1:
        raise ValidationError("threads must be >= 1")
    if threads == 1:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, values))


def cw_rates(emitter: EmitterParams, phonon: PhononParams, rabi_uev: float) -> RateSet:
    """Rates under continuous-wave drive (weak-drive phonon dephasing)."""
    gamma_pd = chi_coefficient(phonon) * rabi_uev**2  # ueV
    return RateSet.from_components(emitter.gamma1, to_angular_frequency(gamma_pd),
                                   emitter.gamma0_rate, to_angular_frequency(rabi_uev))


def sideband_observables(r: RateSet) -> tuple[float, float]:
    """(sideband FWHM, full sideband separation) in ueV from the spectrum peaks.

    NaN when the drive is too weak for resolved sidebands.
    """
    spec = incoherent_spectrum(r, grid=np.zeros(1))
    try:
        red, blue = spec.peak("red-sideband"), spec.peak("blue-sideband")
    except KeyError:
        return math.nan, math.nan
    return 0.5 * (red.fwhm + blue.fwhm), blue.center - red.center


def power_sweep(emitter: EmitterParams, phonon: PhononParams, powers,
                threads: int = 1) -> SweepResult:
    """Rows (power, Omega_r, sideband FWHM, sideband separation) versus power."""

    def point(P):
        rabi = rabi_from_power(P, emitter.kappa)
        fwhm, split = sideband_observables(cw_rates(emitter, phonon, rabi))
        return (float(P), rabi, fwhm, split)

    return SweepResult("power", _map(point, list(powers), threads))


def temperature_sweep(emitter: EmitterParams, phonon: PhononParams, temperatures,
                      threads: int = 1) -> SweepResult:
    """Rows (T, chi, kappa(T), R(T)).

    The configured kappa applies at the phonon temperature; elsewhere it scales
    as R(T) / R(T_ref), i.e. the bare dipole moment is held fixed.
    """
    R_ref = renormalization_factor(phonon)

    def point(T):
        p = PhononParams(phonon.alpha, phonon.omega_c, float(T))
        R = renormalization_factor(p)
        return (float(T), chi_coefficient(p), abs(emitter.kappa) * R / R_ref, R)

    return SweepResult("temperature", _map(point, list(temperatures), threads))
