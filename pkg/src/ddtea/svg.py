"""Static SVG line charts written as plain text (no plotting dependency)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 90, 30, 50, 70
TICKS = 5
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"]


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    color: str | None = None


@dataclass
class Band:
    x: Sequence[float]
    lo: Sequence[float]
    hi: Sequence[float]
    color: str = "#1f77b4"


def _bounds(values: list[float]) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi == lo:
        pad = abs(lo) * 0.05 or 0.5
        return lo - pad, hi + pad
    return lo, hi


def line_chart(
    series: Sequence[Series],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    bands: Sequence[Band] = (),
) -> str:
    """One polyline per series on linear axes; NaN points are skipped."""
    xs = [float(v) for s in series for v in s.x] + [float(v) for b in bands for v in b.x]
    ys = [float(v) for s in series for v in s.y]
    ys += [float(v) for b in bands for v in list(b.lo) + list(b.hi)]
    x0, x1 = _bounds(xs)
    y0, y1 = _bounds(ys)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + ph - (y - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="28" text-anchor="middle" font-size="16">{_escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    for i in range(TICKS + 1):
        xv = x0 + (x1 - x0) * i / TICKS
        yv = y0 + (y1 - y0) * i / TICKS
        out.append(
            f'<line x1="{px(xv):.2f}" y1="{TOP + ph}" x2="{px(xv):.2f}" y2="{TOP + ph + 5}" stroke="#333"/>'
            f'<text x="{px(xv):.2f}" y="{TOP + ph + 20}" text-anchor="middle">{xv:.4g}</text>'
        )
        out.append(
            f'<line x1="{LEFT - 5}" y1="{py(yv):.2f}" x2="{LEFT}" y2="{py(yv):.2f}" stroke="#333"/>'
            f'<text x="{LEFT - 8}" y="{py(yv) + 4:.2f}" text-anchor="end">{yv:.4g}</text>'
        )
    out.append(
        f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 20}" text-anchor="middle">{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="20" y="{TOP + ph / 2}" text-anchor="middle" '
        f'transform="rotate(-90 20 {TOP + ph / 2})">{_escape(y_label)}</text>'
    )
    for b in bands:
        pts = [
            (float(x), float(v))
            for x, v in list(zip(b.x, b.hi)) + list(zip(reversed(list(b.x)), reversed(list(b.lo))))
            if math.isfinite(float(v))
        ]
        if pts:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            out.append(f'<polygon points="{coords}" fill="{b.color}" fill-opacity="0.2" stroke="none"/>')
    for i, s in enumerate(series):
        color = s.color or COLORS[i % len(COLORS)]
        coords = " ".join(
            f"{px(float(x)):.2f},{py(float(y)):.2f}"
            for x, y in zip(s.x, s.y)
            if math.isfinite(float(y))
        )
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = TOP + 18 + 18 * i
        out.append(
            f'<line x1="{LEFT + pw - 150}" y1="{ly}" x2="{LEFT + pw - 125}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
            f'<text x="{LEFT + pw - 120}" y="{ly + 4}">{_escape(s.label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
