"""Hand-written SVG line plots of seed-averaged regret with stderr bands."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .csvio import RegretCsvRow
from .stats import curve

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=30, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0 ** e for e in range(a, b + 1)]
    span = hi - lo or 1.0
    step = 10 ** math.floor(math.log10(span / 5))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    start = math.floor(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step) + 2)]


def render_svg(rows: Sequence[RegretCsvRow], *, loglog: bool = False, title: str = "cumulative expected regret") -> str:
    algorithms = sorted({r.algorithm for r in rows})
    curves = {a: curve(rows, a) for a in algorithms}
    pts = [(t, m, s) for c in curves.values() for t, m, s in c]
    if loglog:
        pts = [p for p in pts if p[0] > 0 and p[1] > 0]
    x0, y0 = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{x0 + pw / 2}" y="18" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if pts:
        tx = [p[0] for p in pts]
        ty = [p[1] - p[2] for p in pts] + [p[1] + p[2] for p in pts]
        if loglog:
            ty = [v for v in ty if v > 0] or [1.0]
        xlo, xhi = min(tx), max(tx)
        ylo, yhi = min(ty), max(ty)
        if not loglog:
            ylo = min(ylo, 0.0)
        if xhi == xlo:
            xhi = xlo + 1
        if yhi == ylo:
            yhi = ylo + 1

        f = math.log10 if loglog else (lambda v: v)

        def sx(v: float) -> float:
            return x0 + pw * (f(v) - f(xlo)) / (f(xhi) - f(xlo))

        def sy(v: float) -> float:
            v = max(v, ylo) if loglog else v
            return y0 + ph * (1 - (f(v) - f(ylo)) / (f(yhi) - f(ylo)))

        for v in _ticks(xlo, xhi, loglog):
            if xlo <= v <= xhi:
                out.append(f'<line x1="{sx(v):.2f}" y1="{y0 + ph}" x2="{sx(v):.2f}" y2="{y0 + ph + 5}" stroke="black"/>')
                out.append(f'<text x="{sx(v):.2f}" y="{y0 + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{v:g}</text>')
        for v in _ticks(ylo, yhi, loglog):
            if ylo <= v <= yhi:
                out.append(f'<line x1="{x0 - 5}" y1="{sy(v):.2f}" x2="{x0}" y2="{sy(v):.2f}" stroke="black"/>')
                out.append(f'<text x="{x0 - 8}" y="{sy(v) + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{v:g}</text>')
        for idx, alg in enumerate(algorithms):
            color = COLORS[idx % len(COLORS)]
            c = [p for p in curves[alg] if not loglog or (p[0] > 0 and p[1] > 0)]
            if not c:
                continue
            upper = [(sx(t), sy(m + s)) for t, m, s in c]
            lower = [(sx(t), sy(m - s)) for t, m, s in reversed(c)]
            band = " ".join(f"{x:.2f},{y:.2f}" for x, y in upper + lower)
            out.append(f'<polygon points="{band}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
            line = " ".join(f"{sx(t):.2f},{sy(m):.2f}" for t, m, _ in c)
            out.append(f'<polyline points="{line}" fill="none" stroke="{color}" stroke-width="2"/>')
            ly = y0 + 20 + 20 * idx
            out.append(f'<line x1="{x0 + pw + 15}" y1="{ly}" x2="{x0 + pw + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{x0 + pw + 45}" y="{ly + 4}" font-family="sans-serif" font-size="12">{escape(alg)}</text>')
    xlabel = "T (log scale)" if loglog else "t"
    out.append(f'<text x="{x0 + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle" font-family="sans-serif" font-size="12">{xlabel}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: Path, rows: Sequence[RegretCsvRow], **kwargs) -> None:
    Path(path).write_text(render_svg(rows, **kwargs))
