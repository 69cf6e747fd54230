"""Minimal log-log scatter + fitted line as a standalone SVG document."""
from __future__ import annotations

import math

WIDTH, HEIGHT = 480, 360
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 20, 50


def _decades(lo, hi):
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    if a == b:
        b += 1
    return a, b


def loglog_svg(points, slope, intercept, xlabel, ylabel="mean l1 error"):
    """SVG text for ``points`` (x, y > 0) and the line ``log y = intercept + slope log x``."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    xa, xb = _decades(min(xs), max(xs))
    ya, yb = _decades(min(ys), max(ys))
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (math.log10(x) - xa) / (xb - xa) * pw

    def py(y):
        return TOP + (yb - math.log10(y)) / (yb - ya) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for d in range(xa, xb + 1):
        x = px(10.0 ** d)
        out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 18}" font-size="11" '
                   f'text-anchor="middle">1e{d}</text>')
    for d in range(ya, yb + 1):
        y = py(10.0 ** d)
        out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">1e{d}</text>')
    x0, x1 = min(xs), max(xs)
    y0 = math.exp(intercept + slope * math.log(x0))
    y1 = math.exp(intercept + slope * math.log(x1))
    out.append(f'<line class="fit" x1="{px(x0):.2f}" y1="{py(y0):.2f}" x2="{px(x1):.2f}" '
               f'y2="{py(y1):.2f}" stroke="firebrick" stroke-width="1.5" '
               f'data-slope="{slope:.12g}"/>')
    for x, y in points:
        out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3.5" fill="steelblue"/>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 10}" font-size="13" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="15" y="{TOP + ph / 2}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 15 {TOP + ph / 2})">{ylabel}</text>')
    out.append(f'<text x="{LEFT + pw - 5}" y="{TOP + 15}" font-size="11" '
               f'text-anchor="end">slope {slope:.3f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
