"""Minimal deterministic SVG writers for scatter, diagram and trend plots.

Direct string emission keeps the artifacts byte-stable across reruns, which
the manifest hashing relies on.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

_SIZE = 480
_MARGIN = 48


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span <= 0:
        span = 1.0
    return out_lo + (np.asarray(values, dtype=float) - lo) * (out_hi - out_lo) / span


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>',
        f'<text x="{_SIZE // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]


def write_scatter_svg(path, points: np.ndarray, title: str = "embedding", labels=None) -> None:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    parts = _header(title)
    if len(pts):
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        xs = _scale(pts[:, 0], lo[0], hi[0], _MARGIN, _SIZE - _MARGIN)
        ys = _scale(pts[:, 1], lo[1], hi[1], _SIZE - _MARGIN, _MARGIN)
        for i, (x, y) in enumerate(zip(xs, ys)):
            color = "#1f77b4"
            if labels is not None and labels[i]:
                color = "#d62728"
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def write_diagram_svg(
    path,
    diagram,
    title: str = "persistence diagram",
    threshold_offset: float | None = None,
) -> None:
    """Birth/death scatter with the diagonal; dim 0 blue, dim 1 red.

    `threshold_offset` draws the classifier hyperplane d = b + offset.
    """
    finite = [(d, b, dd) for d, b, dd in diagram.features if math.isfinite(dd)]
    top = max([dd for _, _, dd in finite] + [b for _, b, _ in finite] + [1.0])
    parts = _header(title)
    span = _SIZE - 2 * _MARGIN

    def sx(v):
        return _MARGIN + v / top * span

    def sy(v):
        return _SIZE - _MARGIN - v / top * span

    parts.append(
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(top):.2f}" y2="{sy(top):.2f}" '
        'stroke="#999999" stroke-width="1"/>'
    )
    if threshold_offset is not None and threshold_offset < top:
        parts.append(
            f'<line x1="{sx(0):.2f}" y1="{sy(threshold_offset):.2f}" '
            f'x2="{sx(top - threshold_offset):.2f}" y2="{sy(top):.2f}" '
            'stroke="#2ca02c" stroke-width="1" stroke-dasharray="6,4"/>'
        )
    for dim, birth, death in finite:
        color = "#1f77b4" if dim == 0 else "#d62728"
        parts.append(
            f'<circle cx="{sx(birth):.2f}" cy="{sy(death):.2f}" r="3" fill="{color}" '
            'fill-opacity="0.7"/>'
        )
    for dim, birth, death in diagram.features:
        if not math.isfinite(death):
            color = "#1f77b4" if dim == 0 else "#d62728"
            parts.append(
                f'<path d="M {sx(birth):.2f} {_MARGIN} l -4 8 l 8 0 z" fill="{color}"/>'
            )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def write_trend_svg(path, x_values, series: dict[str, list[float]], title: str) -> None:
    """Line plot of one or more named series against shared x values."""
    xs = np.asarray(x_values, dtype=float)
    parts = _header(title)
    all_y = np.concatenate([np.asarray(v, dtype=float) for v in series.values()])
    finite = all_y[np.isfinite(all_y)]
    ylo = float(finite.min()) if len(finite) else 0.0
    yhi = float(finite.max()) if len(finite) else 1.0
    if ylo == yhi:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    px = _scale(xs, xs.min(), xs.max(), _MARGIN, _SIZE - _MARGIN)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    for si, (name, ys) in enumerate(sorted(series.items())):
        py = _scale(np.asarray(ys, dtype=float), ylo, yhi, _SIZE - _MARGIN, _MARGIN)
        color = colors[si % len(colors)]
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_SIZE - _MARGIN}" y="{30 + 14 * si}" text-anchor="end" '
            f'font-size="11" fill="{color}">{name}</text>'
        )
        for x, y in zip(px, py):
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
    for i, x in enumerate(px):
        parts.append(
            f'<text x="{x:.2f}" y="{_SIZE - _MARGIN + 16}" text-anchor="middle" '
            f'font-size="10">{x_values[i]}</text>'
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
