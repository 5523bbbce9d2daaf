"""Dependency-free plots: an ASCII chart for terminals and a small SVG writer."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["ascii_plot", "svg_plot", "GLYPHS"]

GLYPHS = " .:-=+*#%@"
COLUMNS, ROWS = 80, 24


def ascii_plot(x, y, title=None, xlabel="position (mm)", xscale=1e3):
    """Scatter ``y`` against ``x`` on a fixed 80x24 character grid.

    Each cell's glyph darkens with the number of points falling in it.  A
    frame line and the axis ranges follow the grid.
    """
    x = np.asarray(x, dtype=float) * xscale
    y = np.asarray(y, dtype=float)
    if x.size == 0:
        return "(no data)\n"
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = min(0.0, float(y.min())), float(y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    col = np.clip(((x - x0) / (x1 - x0) * (COLUMNS - 1)).round().astype(int), 0, COLUMNS - 1)
    row = np.clip(((y1 - y) / (y1 - y0) * (ROWS - 1)).round().astype(int), 0, ROWS - 1)
    grid = np.zeros((ROWS, COLUMNS), dtype=int)
    np.add.at(grid, (row, col), 1)
    top = grid.max()
    levels = np.ceil(grid / top * (len(GLYPHS) - 1)).astype(int)
    lines = []
    if title:
        lines.append(title)
    lines += ["".join(GLYPHS[v] for v in r) for r in levels]
    lines.append("-" * COLUMNS)
    left, right = f"{x0:.4g}", f"{x1:.4g}"
    lines.append(left + xlabel.center(COLUMNS - len(left) - len(right)) + right)
    lines.append(f"y: {y0:.4g} .. {y1:.4g}")
    return "\n".join(lines) + "\n"


def _ticks(lo, hi, n=5):
    span = hi - lo
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [t for t in np.arange(start, hi + step * 1e-9, step)]


def svg_plot(x, y, model=None, title="", xlabel="position (mm)", ylabel="rate (1/s)",
             xscale=1e3, width=640, height=400):
    """SVG 1.1 document with axes, data markers and an optional model polyline.

    ``model`` is an ``(x, y)`` pair drawn as a line over the data points.
    """
    x = np.asarray(x, dtype=float) * xscale
    y = np.asarray(y, dtype=float)
    mx = my = None
    if model is not None:
        mx = np.asarray(model[0], dtype=float) * xscale
        my = np.asarray(model[1], dtype=float)
    allx = x if mx is None else np.concatenate([x, mx])
    ally = y if my is None else np.concatenate([y, my])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = min(0.0, float(ally.min())), float(ally.max()) * 1.05
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    ml, mr, mt, mb = 60, 20, 30, 45
    pw, ph = width - ml - mr, height - mt - mb

    def px(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def py(v):
        return mt + (y1 - v) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<g stroke="black" stroke-width="1" fill="none">'
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}"/>'
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}"/></g>',
        '<g font-family="sans-serif" font-size="11" fill="black">',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{px(t):.2f}" y1="{mt + ph}" x2="{px(t):.2f}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(t):.2f}" y="{mt + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{ml - 5}" y1="{py(t):.2f}" x2="{ml}" y2="{py(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{mt + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {mt + ph / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{ml + pw / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append("</g>")
    out.append('<g fill="steelblue">')
    out += [f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="1.6"/>' for a, b in zip(x, y)]
    out.append("</g>")
    if mx is not None:
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(mx, my))
        out.append(f'<polyline fill="none" stroke="crimson" stroke-width="1.5" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
