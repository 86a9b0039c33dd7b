"""Resonance fluorescence of a phonon-coupled two-level emitter.

Mollow-triplet spectra, excitation-induced dephasing, pulsed Rabi rotations and
the matching fitting pipeline. Energies are in ueV, times in ps, internal rates
in ps^-1.
"""
from .bloch import BlochState, RateSet, evolve, steady_state
from .errors import MollowError, NumericalError, ValidationError
from .phonon import (PhononParams, chi_coefficient, dephasing_rate_full, dephasing_rate_weak,
                     renormalization_factor, spectral_density)
from .pulsed import PulseParams, final_populations, rabi_curve, simulate_pulse
from .spectrum import (PeakRecord, SpectrumResult, convolve_resolution, g1_correlation,
                       incoherent_spectrum, spectrum_transform_oracle)
from .units import HBAR, KB, EmitterParams

__all__ = [
    "BlochState", "RateSet", "evolve", "steady_state",
    "MollowError", "NumericalError", "ValidationError",
    "PhononParams", "chi_coefficient", "dephasing_rate_full", "dephasing_rate_weak",
    "renormalization_factor", "spectral_density",
    "PulseParams", "final_populations", "rabi_curve", "simulate_pulse",
    "PeakRecord", "SpectrumResult", "convolve_resolution", "g1_correlation",
    "incoherent_spectrum", "spectrum_transform_oracle",
    "HBAR", "KB", "EmitterParams",
]
