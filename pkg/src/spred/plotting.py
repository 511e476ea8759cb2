"""Minimal deterministic SVG figures: 2-D scatter plots and persistence diagrams.

The SVG is assembled as text with fixed number formatting, so equal input
gives equal bytes.
"""

import math

import numpy as np

from .errors import InputError

_SIZE = 400
_MARGIN = 40
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def _fmt(x):
    return f"{x:.3f}"


class _Canvas:
    def __init__(self, lo, hi, title):
        span = np.where(hi > lo, hi - lo, 1.0)
        self.lo, self.span = lo, span
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
            f'viewBox="0 0 {_SIZE} {_SIZE}">',
            f'<rect x="0" y="0" width="{_SIZE}" height="{_SIZE}" fill="white"/>',
            f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_SIZE - 2 * _MARGIN}" '
            f'height="{_SIZE - 2 * _MARGIN}" fill="none" stroke="black"/>',
        ]
        if title:
            self.parts.append(f'<text x="{_SIZE / 2}" y="24" text-anchor="middle" '
                              f'font-family="sans-serif" font-size="14">{_escape(title)}</text>')

    def xy(self, p):
        u = (np.asarray(p, dtype=float) - self.lo) / self.span
        inner = _SIZE - 2 * _MARGIN
        return _MARGIN + u[0] * inner, _SIZE - _MARGIN - u[1] * inner

    def circle(self, p, color, r=3):
        x, y = self.xy(p)
        self.parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{color}"/>')

    def triangle(self, p, color, r=5):
        x, y = self.xy(p)
        pts = f"{_fmt(x)},{_fmt(y - r)} {_fmt(x - r)},{_fmt(y + r)} {_fmt(x + r)},{_fmt(y + r)}"
        self.parts.append(f'<polygon points="{pts}" fill="{color}"/>')

    def line(self, p, q, dash=False):
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        style = ' stroke-dasharray="4,3"' if dash else ""
        self.parts.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
                          f'y2="{_fmt(y2)}" stroke="gray"{style}/>')

    def render(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(text):
    return str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def scatter_svg(Y, labels=None, title=""):
    """Scatter plot of a 2-D point cloud, optionally colored by integer labels."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[1] != 2:
        raise InputError(f"scatter plots need 2-D points, got shape {Y.shape}")
    lo = Y.min(axis=0) if len(Y) else np.zeros(2)
    hi = Y.max(axis=0) if len(Y) else np.ones(2)
    pad = 0.05 * np.where(hi > lo, hi - lo, 1.0)
    canvas = _Canvas(lo - pad, hi + pad, title)
    for i, p in enumerate(Y):
        color = _COLORS[0] if labels is None else _COLORS[int(labels[i]) % len(_COLORS)]
        canvas.circle(p, color)
    return canvas.render()


def diagram_svg(diagrams, title=""):
    """Birth/death plot of one or more diagrams with the diagonal.

    Infinite deaths are drawn as triangles at 1.05 times the largest finite
    value on the plot, marked by a dashed line.
    """
    if not isinstance(diagrams, (list, tuple)):
        diagrams = [diagrams]
    finite = [v for D in diagrams for v in np.asarray(D.pairs).ravel() if math.isfinite(v)]
    top = max(finite) if finite else 1.0
    top = top if top > 0 else 1.0
    inf_level = 1.05 * top
    hi = 1.1 * top
    canvas = _Canvas(np.array([0.0, 0.0]), np.array([hi, hi]), title)
    canvas.line((0.0, 0.0), (hi, hi))
    if any(np.isinf(np.asarray(D.pairs)).any() for D in diagrams):
        canvas.line((0.0, inf_level), (hi, inf_level), dash=True)
    for k, D in enumerate(diagrams):
        color = _COLORS[k % len(_COLORS)]
        for b, d in np.asarray(D.pairs).tolist():
            if math.isinf(d):
                canvas.triangle((b, inf_level), color)
            else:
                canvas.circle((b, d), color)
    return canvas.render()


def save_svg(path, text):
    with open(path, "w") as fh:
        fh.write(text)
