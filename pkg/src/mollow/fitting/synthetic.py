"""Seeded synthetic data sets for round-trip tests and demos.

Every generator returns a 2-D float array whose columns follow the CSV
schemas of :mod:`mollow.io`. Output is a pure function of (truth, noise,
seed, grid).
"""
from __future__ import annotations

import math
from typing import Mapping, Optional

import numpy as np

from ..errors import ValidationError
from ..phonon import PhononParams, chi_coefficient, renormalization_factor
from ..pulsed import final_populations
from .g2 import two_sided_exp_bin
from .spectra import triplet_model

KINDS = ("spectrum", "power-series", "temperature-series", "rabi-curve", "g2-histogram")

DEFAULTS = {
    # measured-form triplet: sidepeak:central area 1:12
    "spectrum": dict(center=0.0, rabi=72.0, fwhm_red=31.0, fwhm_blue=43.0,
                     area_red=1.0, area_blue=1.0, area_central=12.0,
                     fwhm_central=20.0, baseline=0.0),
    # kappa in ueV/sqrt(uW), chi in 1/ueV, intercept (3/2 G1 + gamma0) in ueV
    "power-series": dict(kappa=5.04, chi=2.0e-4, intercept=31.76),
    "temperature-series": dict(alpha=0.077, omega_c=4.34, kappa=5.04, t_ref=5.0),
    "rabi-curve": dict(scale=1.0, amplitude=1.0, alpha=0.054, omega_c=4.34,
                       gamma0=30.0, temperature=5.8, delta_t=1.2),
    "g2-histogram": dict(g2_0=0.39, T1=561.0, rep_rate=82.0, area=20000.0,
                         background=0.0, n_side=6, bin_ns=0.02),
}

GRIDS = {
    "spectrum": lambda: np.linspace(-250.0, 250.0, 501),
    "power-series": lambda: np.linspace(20.0, 400.0, 12),  # uW
    "temperature-series": lambda: np.arange(5.0, 36.0, 5.0),  # K
    "rabi-curve": lambda: np.linspace(0.0, 5 * math.pi, 40),  # sqrt(P), scale 1
    "g2-histogram": None,
}


def _normal(rng, shape):
    return rng.standard_normal(shape)


def generate_synthetic_dataset(kind: str, truth: Optional[Mapping] = None,
                               noise: float = 0.0, seed: int = 0,
                               grid=None) -> np.ndarray:
    """Synthetic data of the given kind.

    Noise models: ``spectrum`` multiplicative Gaussian with relative standard
    deviation ``noise``; ``power-series`` and ``temperature-series`` relative
    Gaussian scatter on the measured columns; ``rabi-curve`` additive Gaussian
    with standard deviation ``noise * amplitude``; ``g2-histogram`` Poisson
    counts whenever ``noise > 0`` (the value itself is not used) and the
    expected counts for ``noise == 0``.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown synthetic kind {kind!r}; choose from {KINDS}")
    if noise < 0:
        raise ValidationError("noise level must be >= 0")
    t = dict(DEFAULTS[kind])
    unknown = set(truth or {}) - set(t)
    if unknown:
        raise ValidationError(f"unknown truth parameters for {kind}: {sorted(unknown)}")
    t.update(truth or {})
    rng = np.random.default_rng(seed)
    if grid is None and GRIDS[kind] is not None:
        grid = GRIDS[kind]()
    grid = None if grid is None else np.asarray(grid, dtype=float)

    if kind == "spectrum":
        y = triplet_model(grid, **t)
        if noise:
            y = y * (1.0 + noise * _normal(rng, y.shape))
        return np.column_stack([grid, y])

    if kind == "power-series":
        P = grid
        if np.any(P < 0):
            raise ValidationError("powers must be >= 0")
        rabi = abs(t["kappa"]) * np.sqrt(P)
        fwhm = t["intercept"] + t["chi"] * rabi**2
        splitting = 2.0 * rabi
        if noise:
            e = _normal(rng, (3, P.size))
            rabi_m = rabi * (1.0 + noise * e[0])
            fwhm = fwhm * (1.0 + noise * e[1])
            splitting = splitting * (1.0 + noise * e[2])
            rabi = rabi_m
        return np.column_stack([P, rabi, fwhm, splitting])

    if kind == "temperature-series":
        T = grid
        chi = np.array([chi_coefficient(PhononParams(t["alpha"], t["omega_c"], Ti)) for Ti in T])
        R = np.array([renormalization_factor(PhononParams(t["alpha"], t["omega_c"], Ti)) for Ti in T])
        R_ref = renormalization_factor(PhononParams(t["alpha"], t["omega_c"], t["t_ref"]))
        kappa = abs(t["kappa"]) * R / R_ref
        if noise:
            e = _normal(rng, (2, T.size))
            chi = chi * (1.0 + noise * e[0])
            kappa = kappa * (1.0 + noise * e[1])
        return np.column_stack([T, chi, kappa, R])

    if kind == "rabi-curve":
        x = grid
        ph = PhononParams(t["alpha"], t["omega_c"], t["temperature"])
        y = t["amplitude"] * final_populations(t["scale"] * x, ph, t["gamma0"], t["delta_t"])
        if noise:
            y = y + noise * t["amplitude"] * _normal(rng, y.shape)
        return np.column_stack([x, y])

    # g2-histogram
    period = 1e3 / t["rep_rate"]  # ns
    n_side = int(t["n_side"])
    width = t["bin_ns"]
    half = (n_side + 0.5) * period
    nbins = int(round(2 * half / width))
    edges = -half + width * np.arange(nbins + 1)
    lo, hi = edges[:-1], edges[1:]
    mu = np.full(nbins, t["background"] * width)
    for n in range(-n_side, n_side + 1):
        area = t["area"] * (t["g2_0"] if n == 0 else 1.0)
        mu += two_sided_exp_bin(lo, hi, n * period, t["T1"] * 1e-3, area)
    counts = rng.poisson(mu).astype(float) if noise > 0 else mu
    return np.column_stack([0.5 * (lo + hi), counts])
