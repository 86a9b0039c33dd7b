"""Run configuration: a TOML document whose sections mirror RunConfig.

Example::

    seed = 7
    threads = 4

    [emitter]
    T1 = 561.0        # ps
    gamma0 = 30.0     # ueV
    kappa = 5.04      # ueV / sqrt(uW)

    [phonon]
    alpha = 0.077     # ps^2
    omega_c = 4.34    # ps^-1
    temperature = 5.0 # K

    [drive]
    rabi = 72.0       # ueV  (or: power = 200.0, in uW)

    [pulse]
    delta_t = 1.2     # ps

    [grids.power]
    start = 10.0
    stop = 400.0
    num = 20

    [io]
    output = "out.csv"

Command-line flags override values from the file.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ValidationError
from .phonon import PhononParams
from .pulsed import PulseParams
from .units import EmitterParams


@dataclass(frozen=True)
class RangeSpec:
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if int(self.num) < 1:
            raise ValidationError("range must contain at least one point")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.num))

    @classmethod
    def parse(cls, text: str) -> "RangeSpec":
        """Parse "start:stop:num" (or a single number)."""
        parts = text.split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1)
            if len(parts) == 3:
                return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            pass
        raise ValidationError(f"bad range {text!r}; expected start:stop:num")


@dataclass(frozen=True)
class Drive:
    rabi: Optional[float] = None  # ueV
    power: Optional[float] = None  # uW

    def __post_init__(self):
        if (self.rabi is None) == (self.power is None):
            raise ValidationError("drive needs exactly one of rabi (ueV) or power (uW)")
        v = self.rabi if self.rabi is not None else self.power
        if v < 0:
            raise ValidationError("drive strength must be >= 0")


@dataclass(frozen=True)
class IOPaths:
    input: Optional[str] = None
    output: Optional[str] = None


def default_threads() -> int:
    env = os.environ.get("MOLLOW_THREADS")
    if env is None:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise ValidationError(f"MOLLOW_THREADS must be an integer, got {env!r}") from None
    if n < 1:
        raise ValidationError("MOLLOW_THREADS must be >= 1")
    return n


@dataclass(frozen=True)
class RunConfig:
    emitter: Optional[EmitterParams] = None
    phonon: Optional[PhononParams] = None
    drive: Optional[Drive] = None
    pulse: Optional[PulseParams] = None
    grids: dict = field(default_factory=dict)
    io: IOPaths = IOPaths()
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")


def read_config_file(path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config file {path} not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config file {path}: {exc}") from None


def merge(base: dict, overrides: dict) -> dict:
    """Recursive dict merge; ``None`` override values are ignored."""
    out = dict(base)
    for k, v in overrides.items():
        if v is None:
            continue
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        elif isinstance(v, dict):
            out[k] = merge({}, v)
            if not out[k]:
                del out[k]
        else:
            out[k] = v
    return out


def build_config(doc: dict) -> RunConfig:
    """Validate a nested dict (file contents merged with flags) into a RunConfig."""
    known = {"emitter", "phonon", "drive", "pulse", "grids", "io", "seed", "threads"}
    unknown = set(doc) - known
    if unknown:
        raise ValidationError(f"unknown config sections: {sorted(unknown)}")

    def make(cls, key):
        sec = doc.get(key)
        if sec is None:
            return None
        try:
            return cls(**sec)
        except TypeError as exc:
            raise ValidationError(f"[{key}]: {exc}") from None

    grids = {}
    for name, spec in doc.get("grids", {}).items():
        if isinstance(spec, str):
            grids[name] = RangeSpec.parse(spec)
        else:
            try:
                grids[name] = RangeSpec(**spec)
            except TypeError as exc:
                raise ValidationError(f"[grids.{name}]: {exc}") from None
    threads = doc.get("threads")
    return RunConfig(
        emitter=make(EmitterParams, "emitter"),
        phonon=make(PhononParams, "phonon"),
        drive=make(Drive, "drive"),
        pulse=make(PulseParams, "pulse"),
        grids=grids,
        io=make(IOPaths, "io") or IOPaths(),
        seed=int(doc.get("seed", 0)),
        threads=int(threads) if threads is not None else default_threads(),
    )
