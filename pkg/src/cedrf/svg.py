"""Minimal deterministic SVG line plots (no plotting dependency)."""
import math
from xml.sax.saxutils import escape

from .errors import DomainError

WIDTH, HEIGHT = 800, 600
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 170, 40, 60
_PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _fmt(v):
    return f"{v:.2f}"


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def emit_svg(columns, rows, title=None) -> str:
    """Line plot of every column against the first one.

    ``columns`` are header names and ``rows`` a sequence of numeric rows.
    Needs at least two rows and two columns.
    """
    columns = list(columns)
    rows = [list(map(float, r)) for r in rows]
    if len(columns) < 2 or len(rows) < 2:
        raise DomainError("an SVG plot needs at least 2 rows and 2 columns")
    xs = [r[0] for r in rows]
    finite = [v for r in rows for v in r[1:] if math.isfinite(v)]
    fx = [x for x in xs if math.isfinite(x)]
    if not finite or not fx:
        raise DomainError("no finite values to plot")
    x0, x1 = min(fx), max(fx)
    y0, y1 = min(finite), max(finite)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw, ph = WIDTH - _LEFT - _RIGHT, HEIGHT - _TOP - _BOTTOM

    def px(x):
        return _LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return _TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="16">{escape(title)}</text>')
    # axes
    out.append(f'<line x1="{_LEFT}" y1="{_TOP + ph}" x2="{_LEFT + pw}" y2="{_TOP + ph}" '
               'stroke="black"/>')
    out.append(f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_TOP + ph}" stroke="black"/>')
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{_fmt(px(t))}" y1="{_TOP + ph}" x2="{_fmt(px(t))}" '
                   f'y2="{_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{_TOP + ph + 20}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{_LEFT - 5}" y1="{_fmt(py(t))}" x2="{_LEFT}" '
                   f'y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="12">{t:.4g}</text>')
    out.append(f'<text x="{_LEFT + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">{escape(columns[0])}</text>')
    # one polyline per series
    for j, name in enumerate(columns[1:], start=1):
        color = _PALETTE[(j - 1) % len(_PALETTE)]
        pts = " ".join(f"{_fmt(px(r[0]))},{_fmt(py(r[j]))}" for r in rows
                       if math.isfinite(r[0]) and math.isfinite(r[j]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        ly = _TOP + 20 * j
        lx = WIDTH - _RIGHT + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" '
                   'stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="12">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
