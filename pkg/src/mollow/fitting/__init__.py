from .g2 import correct_g2_background, g2_from_histogram
from .rabi import fit_rabi_curve, rabi_model
from .report import FitReport, SeriesPoint, series
from .linear import extract_alpha_from_temperature, fit_linear
from .spectra import fit_mollow_spectrum, triplet_model
from .synthetic import KINDS, generate_synthetic_dataset

__all__ = [
    "FitReport", "SeriesPoint", "series", "fit_linear", "extract_alpha_from_temperature",
    "fit_mollow_spectrum", "triplet_model", "fit_rabi_curve", "rabi_model",
    "g2_from_histogram", "correct_g2_background", "generate_synthetic_dataset", "KINDS",
]
