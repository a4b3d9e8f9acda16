"""Hand-written SVG output: convergence curves and route maps.

Plain string templates keep the files byte-stable for a given input, which a
plotting library's SVG backend (embedded dates, random ids) would not.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from .errors import ParseError
from .instance import Instance

ROUTE_SIZE = 800
ROUTE_MARGIN = 10
CONV_WIDTH, CONV_HEIGHT, CONV_MARGIN = 800, 500, 60
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"]


def read_trace(path) -> list[tuple[int, float, float]]:
    path = str(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["generation", "best_length", "mean_length"]:
        raise ParseError("expected header generation,best_length,mean_length", 1, path)
    records = []
    for no, row in enumerate(rows[1:], 2):
        if not row:
            continue
        try:
            gen, best, mean = int(row[0]), float(row[1]), float(row[2])
        except (ValueError, IndexError):
            raise ParseError(f"malformed trace row {row!r}", no, path) from None
        records.append((gen, best, mean))
    if not records:
        raise ParseError("trace has no records", path=path)
    return records


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def convergence_svg(records: Sequence[tuple[int, float, float]], title: str = "") -> str:
    """Best length per generation as one polyline."""
    if not records:
        raise ParseError("trace has no records")
    gens = [r[0] for r in records]
    best = [r[1] for r in records]
    g0, g1 = min(gens), max(gens)
    lo, hi = min(best), max(best)
    gspan = (g1 - g0) or 1
    lspan = (hi - lo) or 1.0
    w = CONV_WIDTH - 2 * CONV_MARGIN
    h = CONV_HEIGHT - 2 * CONV_MARGIN

    def px(g):
        return CONV_MARGIN + (g - g0) / gspan * w

    def py(length):
        # larger lengths higher up
        return CONV_HEIGHT - CONV_MARGIN - (length - lo) / lspan * h

    points = " ".join(f"{_fmt(px(g))},{_fmt(py(b))}" for g, b in zip(gens, best))
    x0, y0 = CONV_MARGIN, CONV_HEIGHT - CONV_MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CONV_WIDTH}" height="{CONV_HEIGHT}" '
        f'viewBox="0 0 {CONV_WIDTH} {CONV_HEIGHT}">',
        f'<rect width="{CONV_WIDTH}" height="{CONV_HEIGHT}" fill="white"/>',
        f'<text x="{CONV_WIDTH // 2}" y="30" text-anchor="middle" font-size="18">{title}</text>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{CONV_WIDTH - CONV_MARGIN}" y2="{y0}" stroke="black"/>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{CONV_MARGIN}" stroke="black"/>',
        f'<text x="{CONV_WIDTH // 2}" y="{CONV_HEIGHT - 15}" text-anchor="middle" font-size="14">generation</text>',
        f'<text x="15" y="{CONV_HEIGHT // 2}" font-size="14" transform="rotate(-90 15 {CONV_HEIGHT // 2})" '
        f'text-anchor="middle">best length</text>',
        f'<text x="{x0 - 5}" y="{_fmt(py(hi))}" text-anchor="end" font-size="12">{hi:.4g}</text>',
        f'<text x="{x0 - 5}" y="{_fmt(py(lo))}" text-anchor="end" font-size="12">{lo:.4g}</text>',
        f'<text x="{x0}" y="{y0 + 18}" text-anchor="middle" font-size="12">{g0}</text>',
        f'<text x="{CONV_WIDTH - CONV_MARGIN}" y="{y0 + 18}" text-anchor="middle" font-size="12">{g1}</text>',
        f'<polyline class="best" fill="none" stroke="#1f77b4" stroke-width="2" points="{points}"/>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def route_svg(inst: Instance, tours: Sequence[Sequence[int]]) -> str:
    """Cities as dots, the depot as a square, one closed polyline per vehicle.

    The y axis points up; coordinates are scaled uniformly into an 800x800
    viewport with a 10 pixel margin.
    """
    xs = [c.x for c in inst.cities]
    ys = [c.y for c in inst.cities]
    xmin, ymin = min(xs), min(ys)
    span = max(max(xs) - xmin, max(ys) - ymin) or 1.0
    scale = (ROUTE_SIZE - 2 * ROUTE_MARGIN) / span
    pos = {
        c.id: (ROUTE_MARGIN + (c.x - xmin) * scale, ROUTE_SIZE - ROUTE_MARGIN - (c.y - ymin) * scale)
        for c in inst.cities
    }

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{ROUTE_SIZE}" height="{ROUTE_SIZE}" '
        f'viewBox="0 0 {ROUTE_SIZE} {ROUTE_SIZE}">',
        f'<rect width="{ROUTE_SIZE}" height="{ROUTE_SIZE}" fill="white"/>',
    ]
    for v, tour in enumerate(tours):
        stops = [inst.depot_id, *tour, inst.depot_id]
        points = " ".join(f"{_fmt(pos[c][0])},{_fmt(pos[c][1])}" for c in stops)
        color = PALETTE[v % len(PALETTE)]
        parts.append(
            f'<polyline class="route" data-vehicle="{v + 1}" fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{points}"/>'
        )
    for c in inst.cities:
        if c.id == inst.depot_id:
            continue
        x, y = pos[c.id]
        parts.append(f'<circle class="city" data-id="{c.id}" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="black"/>')
    dx, dy = pos[inst.depot_id]
    parts.append(
        f'<rect class="depot" data-id="{inst.depot_id}" x="{_fmt(dx - 6)}" y="{_fmt(dy - 6)}" '
        f'width="12" height="12" fill="red" stroke="black"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(text: str, path) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")
