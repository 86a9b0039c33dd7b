"""Command-line interface: ``mollow <subcommand> [options]``.

Exit codes: 0 success, 1 validation/usage error, 2 numerical or I/O failure.
Messages go to stderr; data goes to files (or stdout when no --out is given).
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import io as mio
from .config import RangeSpec, build_config, merge, read_config_file
from .errors import NumericalError, ValidationError
from .fitting import (correct_g2_background, extract_alpha_from_temperature,
                      fit_linear, fit_mollow_spectrum, fit_rabi_curve,
                      g2_from_histogram, generate_synthetic_dataset, series)
from .fitting.synthetic import KINDS
from .pulsed import PulseParams, final_populations
from .spectrum import default_grid, spectrum_for
from .sweep import cw_rates, power_sweep, temperature_sweep
from .units import rabi_from_power


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _physics_flags(p):
    g = p.add_argument_group("model parameters (override --config)")
    g.add_argument("--config", help="TOML run configuration")
    g.add_argument("--t1-ps", type=float, help="radiative lifetime T1 (ps)")
    g.add_argument("--gamma0-uev", type=float, help="non-phonon dephasing (ueV)")
    g.add_argument("--kappa", type=float, help="dipole coefficient (ueV/sqrt(uW))")
    g.add_argument("--alpha-ps2", type=float, help="phonon coupling alpha (ps^2)")
    g.add_argument("--omegac-psinv", type=float, help="phonon cutoff (ps^-1)")
    g.add_argument("--temp-k", type=float, help="temperature (K)")


def _drive_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--rabi-uev", type=float, help="renormalized Rabi energy (ueV)")
    g.add_argument("--power-uw", type=float, help="laser power (uW), uses --kappa")


def _out_flags(p, svg=True):
    p.add_argument("--out", help="output file (default: stdout)")
    if svg:
        p.add_argument("--svg", help="also write an SVG plot here")


def _threads_flag(p):
    p.add_argument("--threads", type=int, help="worker threads (default $MOLLOW_THREADS or 1)")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mollow", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("spectrum", help="incoherent resonance-fluorescence spectrum")
    _physics_flags(p)
    _drive_flags(p)
    p.add_argument("--resolution-uev", type=float, default=0.0,
                   help="Gaussian instrument FWHM (ueV)")
    p.add_argument("--points", type=int, default=2048)
    p.add_argument("--span-uev", type=float, help="grid half-width (default 4 Omega_r)")
    p.add_argument("--peaks-json", help="write the peak decomposition here")
    _out_flags(p)

    p = sub.add_parser("sweep-power", help="Omega_r, FWHM and splitting versus power")
    _physics_flags(p)
    p.add_argument("--powers", help="start:stop:num in uW")
    _threads_flag(p)
    _out_flags(p)

    p = sub.add_parser("sweep-temperature", help="chi, kappa and R versus temperature")
    _physics_flags(p)
    p.add_argument("--temps", help="start:stop:num in K")
    _threads_flag(p)
    _out_flags(p)

    p = sub.add_parser("pulse", help="pulsed Rabi curve")
    _physics_flags(p)
    p.add_argument("--theta", default="0:18.84955592153876:61", help="start:stop:num pulse areas (rad)")
    p.add_argument("--delta-t-ps", type=float, help="pulse intensity FWHM (ps)")
    p.add_argument("--scale", type=float, default=1.0, help="theta per sqrt(P) (rad/sqrt(uW))")
    _out_flags(p)

    p = sub.add_parser("fit-spectrum", help="two-Lorentzian + Gaussian triplet fit")
    p.add_argument("--in", dest="input", required=True, help="spectrum CSV")
    p.add_argument("--starts", type=int, default=5)
    _out_flags(p, svg=False)

    p = sub.add_parser("fit-series", help="linear fits of power/temperature series")
    p.add_argument("--kind", required=True, choices=("kappa", "chi", "alpha"))
    p.add_argument("--in", dest="input", required=True,
                   help="power-sweep CSV (kappa, chi) or temperature-sweep CSV (alpha)")
    _out_flags(p, svg=False)

    p = sub.add_parser("fit-rabi", help="fit alpha, omega_c to a pulsed Rabi curve")
    p.add_argument("--in", dest="input", required=True, help="rabi CSV (sqrtP,intensity)")
    p.add_argument("--gamma0-uev", type=float, default=30.0)
    p.add_argument("--temp-k", type=float, default=5.8)
    p.add_argument("--delta-t-ps", type=float, default=1.2)
    p.add_argument("--starts", type=int, default=5)
    _out_flags(p, svg=False)

    p = sub.add_parser("g2", help="g2(0) and T1 from a pulsed HBT histogram")
    p.add_argument("--in", dest="input", required=True, help="g2 CSV (delay_ns,counts)")
    p.add_argument("--rep-rate-mhz", type=float, default=82.0)
    p.add_argument("--rho", type=float, help="signal fraction for background correction")
    _out_flags(p, svg=False)

    p = sub.add_parser("synth", help="seeded synthetic data set")
    p.add_argument("--kind", required=True,
                   choices=KINDS + ("g2", "power", "temperature", "rabi"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--truth", nargs="*", default=[], metavar="KEY=VALUE")
    p.add_argument("--grid", help="start:stop:num for the x axis")
    _out_flags(p, svg=False)
    return ap


SYNTH_ALIASES = {"g2": "g2-histogram", "power": "power-series",
                 "temperature": "temperature-series", "rabi": "rabi-curve"}
SYNTH_SCHEMA = {"spectrum": "spectrum", "power-series": "power",
                "temperature-series": "temperature", "rabi-curve": "rabi",
                "g2-histogram": "g2"}


def _config_from_args(a, grid_name=None, grid_flag=None, emitter_flags=True):
    doc = read_config_file(a.config) if getattr(a, "config", None) else {}
    flags = {
        "emitter": {"T1": getattr(a, "t1_ps", None), "gamma0": getattr(a, "gamma0_uev", None),
                    "kappa": getattr(a, "kappa", None)} if emitter_flags else {},
        "phonon": {"alpha": getattr(a, "alpha_ps2", None), "omega_c": getattr(a, "omegac_psinv", None),
                   "temperature": getattr(a, "temp_k", None)},
        "threads": getattr(a, "threads", None),
        "seed": getattr(a, "seed", None),
    }
    rabi, power = getattr(a, "rabi_uev", None), getattr(a, "power_uw", None)
    if rabi is not None or power is not None:
        doc.pop("drive", None)
        flags["drive"] = {"rabi": rabi, "power": power}
    if getattr(a, "delta_t_ps", None) is not None:
        flags["pulse"] = {"delta_t": a.delta_t_ps}
    if grid_name and grid_flag is not None:
        flags["grids"] = {grid_name: grid_flag}
    return build_config(merge(doc, flags))


def _require(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        flagmap = {"emitter": "--t1-ps/--gamma0-uev", "phonon": "--alpha-ps2/--omegac-psinv/--temp-k",
                   "drive": "--rabi-uev or --power-uw"}
        raise ValidationError("missing parameters: " + ", ".join(flagmap.get(m, m) for m in missing))


def _grid(cfg, name, flag):
    if name not in cfg.grids:
        raise ValidationError(f"missing grid: {flag} start:stop:num")
    return cfg.grids[name].values()


def cmd_spectrum(a):
    cfg = _config_from_args(a)
    _require(cfg, "emitter", "phonon", "drive")
    rabi = cfg.drive.rabi if cfg.drive.rabi is not None else rabi_from_power(cfg.drive.power, cfg.emitter.kappa)
    r = cw_rates(cfg.emitter, cfg.phonon, rabi)
    if a.points < 2:
        raise ValidationError("--points must be >= 2")
    if a.span_uev is not None:
        grid = np.linspace(-a.span_uev, a.span_uev, a.points)
    else:
        grid = default_grid(r, a.points)
    spec = spectrum_for(r, grid, a.resolution_uev)
    mio.emit_outputs(spec, a.out, a.svg, a.peaks_json)


def cmd_sweep_power(a):
    cfg = _config_from_args(a, "power", a.powers and RangeSpec.parse(a.powers).__dict__)
    _require(cfg, "emitter", "phonon")
    res = power_sweep(cfg.emitter, cfg.phonon, _grid(cfg, "power", "--powers"), cfg.threads)
    mio.emit_outputs(res, a.out, a.svg)


def cmd_sweep_temperature(a):
    cfg = _config_from_args(a, "temperature", a.temps and RangeSpec.parse(a.temps).__dict__)
    _require(cfg, "emitter", "phonon")
    res = temperature_sweep(cfg.emitter, cfg.phonon, _grid(cfg, "temperature", "--temps"), cfg.threads)
    mio.emit_outputs(res, a.out, a.svg)


def cmd_pulse(a):
    # pulses need only gamma0 from the emitter (G1 = 0 on the pulse time scale)
    cfg = _config_from_args(a, emitter_flags=False)
    _require(cfg, "phonon")
    if a.gamma0_uev is not None:
        gamma0 = a.gamma0_uev
    else:
        gamma0 = cfg.emitter.gamma0 if cfg.emitter is not None else 0.0
    pulse = cfg.pulse or PulseParams()
    if not a.scale > 0:
        raise ValidationError("--scale must be positive")
    th = RangeSpec.parse(a.theta).values()
    pops = final_populations(th, cfg.phonon, gamma0, pulse.delta_t)
    rows = np.column_stack([th / a.scale, pops])
    text = mio.table_to_csv("rabi", rows)
    _emit_text(text, a.out)
    if a.svg:
        mio.write_svg(a.svg, rows[:, 0], {"population": pops}, "sqrtP", "final population")


def _emit_text(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        mio._write_text(out, text)


def cmd_fit_spectrum(a):
    d = mio.load_table(a.input, "spectrum")
    rep = fit_mollow_spectrum(d[:, 0], d[:, 1], n_starts=a.starts)
    mio.emit_outputs(rep, a.out)


def cmd_fit_series(a):
    if a.kind == "alpha":
        d = mio.load_table(a.input, "temperature", strict=False)
        rep = extract_alpha_from_temperature(series(d[:, 0], d[:, 1]))
    else:
        d = mio.load_table(a.input, "power", strict=False)
        if a.kind == "kappa":
            rep = fit_linear(series(np.sqrt(d[:, 0]), d[:, 1]), through_origin=True)
            rep.params["kappa"] = rep.params.pop("slope")
            rep.std_errors["kappa"] = rep.std_errors.pop("slope")
            del rep.params["intercept"], rep.std_errors["intercept"]
        else:
            rep = fit_linear(series(d[:, 1] ** 2, d[:, 2]))
            rep.params["chi"] = rep.params.pop("slope")
            rep.std_errors["chi"] = rep.std_errors.pop("slope")
    mio.emit_outputs(rep, a.out)


def cmd_fit_rabi(a):
    d = mio.load_table(a.input, "rabi")
    rep = fit_rabi_curve(series(d[:, 0], d[:, 1]), gamma0=a.gamma0_uev,
                         pulse=PulseParams(delta_t=a.delta_t_ps), temperature=a.temp_k,
                         n_starts=a.starts)
    mio.emit_outputs(rep, a.out)


def cmd_g2(a):
    if not a.rep_rate_mhz > 0:
        raise ValidationError("--rep-rate-mhz must be positive")
    d = mio.load_table(a.input, "g2")
    rep = g2_from_histogram(d[:, 0], d[:, 1], 1e3 / a.rep_rate_mhz)
    if a.rho is not None:
        rep.params["g2_0_corrected"] = correct_g2_background(rep.params["g2_0"], a.rho)
        rep.std_errors["g2_0_corrected"] = rep.std_errors["g2_0"] / a.rho**2
    mio.emit_outputs(rep, a.out)


def _parse_truth(items):
    truth = {}
    for it in items:
        k, sep, v = it.partition("=")
        if not sep:
            raise ValidationError(f"bad --truth entry {it!r}; expected KEY=VALUE")
        try:
            truth[k] = float(v)
        except ValueError:
            raise ValidationError(f"--truth {k}: not a number: {v!r}") from None
    return truth


def cmd_synth(a):
    kind = SYNTH_ALIASES.get(a.kind, a.kind)
    grid = RangeSpec.parse(a.grid).values() if a.grid else None
    data = generate_synthetic_dataset(kind, _parse_truth(a.truth), a.noise, a.seed, grid)
    _emit_text(mio.table_to_csv(SYNTH_SCHEMA[kind], data), a.out)


COMMANDS = {
    "spectrum": cmd_spectrum, "sweep-power": cmd_sweep_power,
    "sweep-temperature": cmd_sweep_temperature, "pulse": cmd_pulse,
    "fit-spectrum": cmd_fit_spectrum, "fit-series": cmd_fit_series,
    "fit-rabi": cmd_fit_rabi, "g2": cmd_g2, "synth": cmd_synth,
}


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mollow: error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"mollow: invalid input: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"mollow: numerical failure: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except OSError as exc:
        print(f"mollow: I/O error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
