"""CSV / JSON / SVG input and output."""
from __future__ import annotations

import csv
from dataclasses import asdict
import io
import json
import math
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

SCHEMAS = {
    "spectrum": ("detuning_ueV", "intensity"),
    "power": ("power_uW", "rabi_ueV", "fwhm_ueV", "splitting_ueV"),
    "temperature": ("temp_K", "chi_per_ueV", "kappa_ueV_per_sqrtuW", "R"),
    "rabi": ("sqrtP", "intensity"),
    "g2": ("delay_ns", "counts"),
}


def format_number(v) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(v))


def load_table(path, schema, strict: bool = True) -> np.ndarray:
    """Read a CSV file whose header matches ``schema`` exactly.

    ``schema`` is a key of SCHEMAS or a tuple of column names. In strict mode
    NaN and infinite cells are rejected; otherwise rows containing them are
    dropped.
    """
    cols = SCHEMAS[schema] if isinstance(schema, str) else tuple(schema)
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"{path}: file not found")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: no data rows") from None
        header = [h.strip() for h in header]
        if tuple(header) != cols:
            raise ValidationError(
                f"{path}: header {','.join(header)!r} does not match expected {','.join(cols)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(cols):
                raise ValidationError(
                    f"{path}: line {lineno}: expected {len(cols)} columns, got {len(row)}")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise ValidationError(f"{path}: line {lineno}: non-numeric cell in {row!r}") from None
            if not all(math.isfinite(v) for v in vals):
                if strict:
                    raise ValidationError(f"{path}: line {lineno}: NaN or infinite value")
                continue
            rows.append(vals)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def table_to_csv(schema, rows: Iterable[Sequence[float]]) -> str:
    cols = SCHEMAS[schema] if isinstance(schema, str) else tuple(schema)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        if len(row) != len(cols):
            raise ValidationError("row length does not match schema")
        w.writerow([format_number(v) for v in row])
    return buf.getvalue()


def _write_text(path, text: str) -> None:
    # write-then-rename so a failed run never leaves a partial file behind
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def write_table(path, schema, rows) -> None:
    _write_text(path, table_to_csv(schema, rows))


def report_to_json(report) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n"


def write_json(path, report) -> None:
    _write_text(path, report_to_json(report))


def svg_plot(x, series: dict, xlabel: str, ylabel: str, title: str = "",
             width: int = 640, height: int = 400) -> str:
    """Minimal line plot with one <polyline> per series.

    Series with very different magnitudes are each scaled to their own maximum
    when ``ylabel`` is "normalized".
    """
    x = np.asarray(x, dtype=float)
    ml, mr, mt, mb = 70, 20, 30, 50
    pw, ph = width - ml - mr, height - mt - mb
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    finite_y = np.concatenate([v[np.isfinite(v)] for v in ys.values()] or [np.zeros(1)])
    x0, x1 = float(np.nanmin(x)), float(np.nanmax(x))
    y0, y1 = (float(finite_y.min()), float(finite_y.max())) if finite_y.size else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="14">{title}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 10}" text-anchor="middle" '
               f'font-size="12">{xlabel}</text>')
    out.append(f'<text x="15" y="{mt + ph / 2}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 15 {mt + ph / 2})">{ylabel}</text>')
    for v, anchor, xx, yy in ((x0, "start", ml, height - mb + 15), (x1, "end", ml + pw, height - mb + 15)):
        out.append(f'<text x="{xx}" y="{yy}" text-anchor="{anchor}" font-size="10">{v:.4g}</text>')
    for v, yy in ((y0, mt + ph), (y1, mt + 10)):
        out.append(f'<text x="{ml - 5}" y="{yy}" text-anchor="end" font-size="10">{v:.4g}</text>')
    for i, (name, y) in enumerate(ys.items()):
        ok = np.isfinite(x) & np.isfinite(y)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok]))
        c = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{ml + pw - 5}" y="{mt + 15 + 14 * i}" text-anchor="end" '
                   f'font-size="11" fill="{c}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, x, series: dict, xlabel: str, ylabel: str, title: str = "") -> None:
    _write_text(path, svg_plot(x, series, xlabel, ylabel, title))


def emit_outputs(result, out=None, svg=None, json_path=None) -> None:
    """Write a SpectrumResult, SweepResult or FitReport to the requested files.

    CSV (or JSON for fit reports) goes to ``out``; standard output when ``out``
    is None.
    """
    import sys

    from .fitting.report import FitReport
    from .spectrum import SpectrumResult
    from .sweep import SweepResult

    if isinstance(result, FitReport):
        text = report_to_json(result)
        if out is None:
            sys.stdout.write(text)
        else:
            _write_text(out, text)
        return
    if isinstance(result, SpectrumResult):
        rows = np.column_stack([result.detuning_grid, result.intensity])
        schema = "spectrum"
        plot = (result.detuning_grid, {"incoherent spectrum": result.intensity},
                "detuning (ueV)", "intensity (arb. units)")
    elif isinstance(result, SweepResult):
        rows = result.rows
        schema = result.schema
        data = np.asarray(result.rows, dtype=float)
        obs = {}
        for j, name in enumerate(SCHEMAS[schema][1:], start=1):
            col = data[:, j]
            m = np.nanmax(np.abs(col)) if np.any(np.isfinite(col)) else 1.0
            obs[name] = col / m if m else col
        plot = (data[:, 0], obs, SCHEMAS[schema][0], "normalized")
    else:
        raise ValidationError(f"cannot emit {type(result).__name__}")
    text = table_to_csv(schema, rows)
    if out is None:
        sys.stdout.write(text)
    else:
        _write_text(out, text)
    if json_path is not None and isinstance(result, SpectrumResult):
        _write_text(json_path, json.dumps(
            {"peaks": [asdict(p) for p in result.peaks]}, indent=2) + "\n")
    if svg is not None:
        write_svg(svg, plot[0], plot[1], plot[2], plot[3])
