"""Minimal deterministic SVG line plots: one panel per entry, shared x axis."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .core import SignalError
from .fileio import _atomic_write

WIDTH = 800
PANEL_H = 180
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 30
MAX_POINTS = 4000
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    return np.linspace(lo, hi, n)


def _label(v: float) -> str:
    return f"{v:.3g}"


def _decimate(x: np.ndarray, y: np.ndarray):
    if x.size <= MAX_POINTS:
        return x, y
    step = int(np.ceil(x.size / MAX_POINTS))
    idx = np.arange(0, x.size, step)
    if idx[-1] != x.size - 1:
        idx = np.append(idx, x.size - 1)
    return x[idx], y[idx]


def _normalise(panels) -> list:
    """Accept ``{name: array}`` (one panel each) or a list of such dicts."""
    if isinstance(panels, dict):
        return [{k: v} for k, v in panels.items()]
    return list(panels)


def render(panels, x=None, title: str | None = None) -> str:
    panels = _normalise(panels)
    if not panels:
        raise SignalError("nothing to plot")
    arrays = [np.asarray(a, dtype=float).ravel() for p in panels for a in p.values()]
    sizes = {a.size for a in arrays}
    if len(sizes) != 1:
        raise SignalError("series lengths differ")
    n = sizes.pop()
    if n == 0:
        raise SignalError("series are empty")
    xs = np.arange(n, dtype=float) if x is None else np.asarray(x, dtype=float).ravel()
    if xs.size != n:
        raise SignalError("x axis length differs from series")
    x0, x1 = float(xs[0]), float(xs[-1])
    if x1 == x0:
        x1 = x0 + 1.0
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = PANEL_H - MARGIN_T - MARGIN_B
    height = PANEL_H * len(panels) + (20 if title else 0)
    top0 = 20 if title else 0
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="15" text-anchor="middle" font-size="13">'
                   f"{escape(title)}</text>")
    for k, panel in enumerate(panels):
        top = top0 + k * PANEL_H + MARGIN_T
        ys = [np.asarray(v, dtype=float).ravel() for v in panel.values()]
        finite = np.concatenate([y[np.isfinite(y)] for y in ys])
        lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
        if hi == lo:
            lo, hi = lo - 1.0, hi + 1.0

        def px(v):
            return MARGIN_L + (v - x0) / (x1 - x0) * pw

        def py(v):
            return top + ph - (v - lo) / (hi - lo) * ph

        out.append(f'<rect x="{MARGIN_L}" y="{top}" width="{pw}" height="{ph}" '
                   'fill="none" stroke="black" stroke-width="0.8"/>')
        for tv in _ticks(lo, hi):
            yy = _fmt(py(tv))
            out.append(f'<line x1="{MARGIN_L - 4}" y1="{yy}" x2="{MARGIN_L}" y2="{yy}" stroke="black"/>')
            out.append(f'<text x="{MARGIN_L - 6}" y="{yy}" text-anchor="end" '
                       f'dominant-baseline="middle">{_label(tv)}</text>')
        for tv in _ticks(x0, x1):
            xx = _fmt(px(tv))
            yb = top + ph
            out.append(f'<line x1="{xx}" y1="{yb}" x2="{xx}" y2="{yb + 4}" stroke="black"/>')
            out.append(f'<text x="{xx}" y="{yb + 15}" text-anchor="middle">{_label(tv)}</text>')
        for j, (name, y) in enumerate(zip(panel.keys(), ys)):
            color = COLORS[j % len(COLORS)]
            dx, dy = _decimate(xs, y)
            ok = np.isfinite(dy)
            pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(dx[ok], dy[ok]))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>')
            ly = top + 12 + 13 * j
            out.append(f'<line x1="{WIDTH - MARGIN_R - 110}" y1="{ly - 4}" '
                       f'x2="{WIDTH - MARGIN_R - 92}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{WIDTH - MARGIN_R - 88}" y="{ly}">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(panels, path, x=None, title: str | None = None) -> None:
    """Write an SVG with one panel per series (or per dict of series)."""
    _atomic_write(path, render(panels, x, title))
