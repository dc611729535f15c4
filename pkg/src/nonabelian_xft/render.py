"""Deterministic text output: number formatting, CSV tables and SVG line charts."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

SWEEP_COLUMNS = (
    "betaA", "chiA", "betaB", "chiB", "alpha",
    "avg_dq_z", "avg_dq_x", "avg_delta", "sigma_avg",
    "integral_ft", "naive_ft", "uncorrected_second_law",
    "inversion_z", "inversion_x", "double_inversion",
    "tur_min_margin", "flags",
)  # fmt: skip


def fmt_float(x: Optional[float]) -> str:
    """17 significant digits, so every double round-trips exactly."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x + 0.0, ".17g")


def fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def json_safe(obj):
    """Recursively convert numpy scalars/arrays and replace non-finite floats by None."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return json_safe(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v + 0.0 if math.isfinite(v) else None
    return obj


def matrix_to_pairs(m) -> list:
    """Complex matrix as nested ``[re, im]`` pairs (the config matrix format)."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real) + 0.0, float(z.imag) + 0.0] for z in row] for row in m]


def sweep_rows(points) -> list:
    rows = []
    for p in points:
        prm = p.params
        rows.append(
            [
                fmt_float(prm.betaA), fmt_float(prm.chiA), fmt_float(prm.betaB), fmt_float(prm.chiB),
                fmt_float(prm.alpha),
                fmt_float(p.avg_dq_z), fmt_float(p.avg_dq_x), fmt_float(p.avg_delta), fmt_float(p.sigma_avg),
                fmt_float(p.integral_ft), fmt_float(p.naive_ft), fmt_float(p.uncorrected_second_law),
                fmt_bool(p.inversion_z), fmt_bool(p.inversion_x), fmt_bool(p.double_inversion),
                "degenerate" if p.tur_min_margin is None else fmt_float(p.tur_min_margin),
                ";".join(p.flags),
            ]
        )  # fmt: skip
    return rows


def write_sweep_csv(points, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows(sweep_rows(points))


def trajectory_columns(n_charges: int) -> list:
    return (
        ["n", "nu", "m", "mu", "prob", "dhA", "dhB"]
        + [f"dq_{i + 1}" for i in range(n_charges)]
        + ["delta", "delta_explicit", "flags"]
    )


def write_trajectory_csv(table, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(trajectory_columns(len(table.deltas_lambda)))
    for r in table.rows:
        w.writerow(
            [r.n, r.nu, r.m, r.mu, fmt_float(r.prob), fmt_float(r.dhA), fmt_float(r.dhB)]
            + [fmt_float(x) for x in r.dq]
            + [
                fmt_float(r.delta),
                "inapplicable" if r.delta_explicit is None else fmt_float(r.delta_explicit),
                ";".join(r.flags),
            ]
        )


def to_csv_text(writer, *args) -> str:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()


# --- SVG -----------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
_W, _H = 760, 460
_ML, _MR, _MT, _MB = 80, 180, 40, 60


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list:
    span = hi - lo
    raw = span / max(target, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _range(values: Iterable[float]) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi - lo <= 1e-12 * max(1.0, abs(lo), abs(hi)):
        pad = 0.5 * max(abs(lo), 1e-3)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg(x: Sequence[float], series: dict, xlabel: str, title: str = "") -> str:
    """Line chart with one polyline per series; NaN values break the line."""
    xs = [float(v) for v in x]
    x0, x1 = _range(xs)
    y0, y1 = _range(v for ys in series.values() for v in ys)
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(v):
        return _ML + (v - x0) / (x1 - x0) * pw

    def py(v):
        return _MT + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{_ML + pw / 2:.2f}" y="{_MT - 14}" text-anchor="middle" font-size="15">{_esc(title)}</text>')
    for t in _nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{_MT + ph}" x2="{X:.2f}" y2="{_MT + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{_MT + ph + 19}" text-anchor="middle" font-size="11">{t:.4g}</text>')
    for t in _nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{_ML - 5}" y1="{Y:.2f}" x2="{_ML}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<line x1="{_ML}" y1="{Y:.2f}" x2="{_ML + pw}" y2="{Y:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{_ML - 8}" y="{Y + 4:.2f}" text-anchor="end" font-size="11">{t:.4g}</text>')
    out.append(f'<text x="{_ML + pw / 2:.2f}" y="{_H - 14}" text-anchor="middle" font-size="13">{_esc(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{_MT + ph / 2:.2f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {_MT + ph / 2:.2f})">value</text>'
    )
    for k, (name, ys) in enumerate(series.items()):
        color = _PALETTE[k % len(_PALETTE)]
        segment = []
        segments = []
        for xv, yv in zip(xs, ys):
            if math.isfinite(yv):
                segment.append(f"{px(xv):.2f},{py(yv):.2f}")
            elif segment:
                segments.append(segment)
                segment = []
        if segment:
            segments.append(segment)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        ly = _MT + 16 + 18 * k
        lx = _ML + pw + 14
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}" font-size="12">{_esc(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
