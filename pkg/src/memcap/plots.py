"""Minimal deterministic SVG line charts for curve families.

Hand-rolled so chart bytes depend only on the data: no timestamps, library
version strings, or font metrics.
"""

from __future__ import annotations

import math
from typing import Sequence

_WIDTH, _HEIGHT = 720, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 36, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _transform(values, lo, hi, out_lo, out_hi, logscale):
    if logscale:
        lo, hi = math.log10(lo), math.log10(hi)
        values = [math.log10(v) for v in values]
    span = (hi - lo) or 1.0
    return [out_lo + (v - lo) * (out_hi - out_lo) / span for v in values]


def _ticks(lo, hi, logscale, count=6):
    if logscale:
        lo_exp, hi_exp = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        step = max(1, (hi_exp - lo_exp) // count)
        return [10.0**e for e in range(lo_exp, hi_exp + 1, step)]
    step = (hi - lo) / count or 1.0
    return [lo + k * step for k in range(count + 1)]


def write_line_chart(
    path,
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
    log_x: bool = False,
    scatter: Sequence[tuple[str, Sequence[float], Sequence[float]]] = (),
) -> None:
    """Write an SVG with one polyline per (label, x, y) series.

    Entries in ``scatter`` are drawn as point markers instead of lines.
    """
    points = [
        (x, y)
        for _, xs, ys in list(series) + list(scatter)
        for x, y in zip(xs, ys)
        if math.isfinite(x) and math.isfinite(y)
    ]
    if not points:
        raise ValueError("nothing to plot")
    xs_all = [p[0] for p in points]
    ys_all = [p[1] for p in points]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if log_x:
        x_lo = max(x_lo, 1e-300)
        x_hi = max(x_hi, x_lo * 10.0)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="monospace" font-size="12">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    plot_l, plot_r = _MARGIN_L, _WIDTH - _MARGIN_R
    plot_t, plot_b = _MARGIN_T, _HEIGHT - _MARGIN_B
    parts.append(
        f'<rect x="{plot_l}" y="{plot_t}" width="{plot_r - plot_l}" height="{plot_b - plot_t}" '
        'fill="none" stroke="#444444"/>'
    )
    for tick in _ticks(x_lo, x_hi, log_x):
        if not (x_lo <= tick <= x_hi):
            continue
        (px,) = _transform([tick], x_lo, x_hi, plot_l, plot_r, log_x)
        parts.append(f'<line x1="{px:.2f}" y1="{plot_b}" x2="{px:.2f}" y2="{plot_b + 5}" stroke="#444444"/>')
        parts.append(f'<text x="{px:.2f}" y="{plot_b + 18}" text-anchor="middle">{tick:.3g}</text>')
    for tick in _ticks(y_lo, y_hi, False):
        (py,) = _transform([tick], y_lo, y_hi, plot_b, plot_t, False)
        parts.append(f'<line x1="{plot_l - 5}" y1="{py:.2f}" x2="{plot_l}" y2="{py:.2f}" stroke="#444444"/>')
        parts.append(f'<text x="{plot_l - 8}" y="{py + 4:.2f}" text-anchor="end">{tick:.3g}</text>')
    parts.append(f'<text x="{(plot_l + plot_r) / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle">{x_label}</text>')
    parts.append(
        f'<text x="16" y="{(plot_t + plot_b) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(plot_t + plot_b) / 2:.1f})">{y_label}</text>'
    )
    legend_row = 0
    for idx, (label, xs, ys) in enumerate(list(series) + list(scatter)):
        color = _COLORS[idx % len(_COLORS)]
        as_points = idx >= len(series)
        pts = [
            (x, y)
            for x, y in zip(xs, ys)
            if math.isfinite(x) and math.isfinite(y) and (not log_x or x > 0.0)
        ]
        if not pts:
            continue
        px = _transform([p[0] for p in pts], x_lo, x_hi, plot_l, plot_r, log_x)
        py = _transform([p[1] for p in pts], y_lo, y_hi, plot_b, plot_t, False)
        if as_points:
            for x, y in zip(px, py):
                parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.5" fill="{color}"/>')
        else:
            coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(
            f'<text x="{plot_r - 8}" y="{plot_t + 16 + 16 * legend_row}" text-anchor="end" fill="{color}">{label}</text>'
        )
        legend_row += 1
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
