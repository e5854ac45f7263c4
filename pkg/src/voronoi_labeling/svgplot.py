"""Minimal self-contained SVG for BER curves (log10 BER against Eb/N0)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

COLORS = ("#1f77b4", "#d62728", "#2ca02c")
WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 20, 50


def ber_svg(curves: list[tuple[str, list[float], list[float]]], title: str = "") -> str:
    """Render up to three ``(label, ebn0_db, ber)`` curves; zero-BER points are dropped."""
    if not 1 <= len(curves) <= 3:
        raise ValueError("can plot one to three curves")
    xs = [x for _, cx, _ in curves for x in cx]
    ys = [y for _, _, cy in curves for y in cy if y > 0]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if ys:
        d0, d1 = math.floor(math.log10(min(ys))), math.ceil(math.log10(max(ys)))
    else:
        d0, d1 = -6, 0
    if d1 == d0:
        d1 += 1
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (d1 - math.log10(y)) / (d1 - d0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for d in range(d0, d1 + 1):
        y = py(10.0**d)
        out.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{LEFT + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y + 4:.2f}" text-anchor="end">1e{d}</text>')
    nticks = 6
    for k in range(nticks + 1):
        x = x0 + (x1 - x0) * k / nticks
        out.append(f'<line x1="{px(x):.2f}" y1="{TOP}" x2="{px(x):.2f}" y2="{TOP + ph}" stroke="#eee"/>')
        out.append(f'<text x="{px(x):.2f}" y="{TOP + ph + 16}" text-anchor="middle">{x:.2f}</text>')
    out.append(
        f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">Eb/N0 (dB)</text>'
    )
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">BER</text>'
    )
    if title:
        out.append(f'<text x="{LEFT + 8}" y="{TOP + 16}">{escape(title)}</text>')
    for c, (label, cx, cy) in enumerate(curves):
        color = COLORS[c]
        pts = [(px(x), py(y)) for x, y in zip(cx, cy) if y > 0]
        if pts:
            path = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
            for a, b in pts:
                out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="{color}"/>')
        ly = TOP + ph - 16 * (len(curves) - c)
        out.append(f'<line x1="{LEFT + pw - 170}" y1="{ly - 4}" x2="{LEFT + pw - 150}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + pw - 144}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
