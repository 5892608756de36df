"""Deterministic SVG rendering of tilings and candidate graphs.

Realized tilings are drawn as coloured polygons in the unit frame;
candidates without a realization fall back to a combinatorial diagram:
a Tutte barycentric drawing of the graph with the side cycle pinned to
a square, which is planar and unique for 3-connected graphs.
"""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import numpy as np

from .planegraph import CandidatePair

PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
)

SIDE_ANCHORS = ((1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0))


def _fmt(x: float) -> str:
    return f"{x:.6f}".rstrip("0").rstrip(".")


def svg_document(elements: Sequence[str], width: int = 400, height: int = 400) -> str:
    body = "\n".join(f"  {e}" for e in elements)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="-0.1 -0.1 1.2 1.2">\n{body}\n</svg>\n'
    )


def _polygon(points, fill: str, stroke: str = "#333333", width: float = 0.004) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(1.0 - y)}" for x, y in points)
    return (
        f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}" '
        f'stroke-width="{_fmt(width)}" stroke-linejoin="round"/>'
    )


def _line(p, q, stroke: str, width: float = 0.003) -> str:
    return (
        f'<line x1="{_fmt(p[0])}" y1="{_fmt(1.0 - p[1])}" x2="{_fmt(q[0])}" '
        f'y2="{_fmt(1.0 - q[1])}" stroke="{stroke}" stroke-width="{_fmt(width)}"/>'
    )


def _circle(p, r: float, fill: str) -> str:
    return f'<circle cx="{_fmt(p[0])}" cy="{_fmt(1.0 - p[1])}" r="{_fmt(r)}" fill="{fill}"/>'


def render_tiling_svg(tiles: Mapping[int, Sequence[tuple[float, float]]]) -> str:
    """Tiling drawing from realized tile polygons (unit frame)."""
    elements = [_polygon(((0, 0), (1, 0), (1, 1), (0, 1)), "#ffffff", "#000000", 0.006)]
    for i, t in enumerate(sorted(tiles)):
        elements.append(_polygon(tiles[t], PALETTE[i % len(PALETTE)]))
    return svg_document(elements)


def tutte_layout(cand: CandidatePair) -> dict[int, tuple[float, float]]:
    """Barycentric layout with the side cycle pinned to the unit square."""
    g = cand.graph
    n = g.vertex_count
    fixed: dict[int, tuple[float, float]] = {
        s: SIDE_ANCHORS[k] for k, s in enumerate(cand.sides)
    }
    free = [v for v in range(n) if v not in fixed]
    index = {v: i for i, v in enumerate(free)}
    a = np.zeros((len(free), len(free)))
    bx = np.zeros(len(free))
    by = np.zeros(len(free))
    for v in free:
        i = index[v]
        deg = g.degree(v)
        a[i, i] = deg
        for w in g.rotation[v]:
            if w in fixed:
                bx[i] += fixed[w][0]
                by[i] += fixed[w][1]
            else:
                a[i, index[w]] -= 1
    if free:
        xs = np.linalg.solve(a, bx)
        ys = np.linalg.solve(a, by)
    pos = dict(fixed)
    for v in free:
        pos[v] = (float(xs[index[v]]), float(ys[index[v]]))
    return pos


def render_graph_svg(cand: CandidatePair) -> str:
    """Combinatorial diagram of a candidate pair."""
    pos = tutte_layout(cand)
    g = cand.graph
    elements = [_polygon(((0, 0), (1, 0), (1, 1), (0, 1)), "#ffffff", "#aaaaaa", 0.004)]
    for u, v in g.edges:
        elements.append(_line(pos[u], pos[v], "#cc3333"))
    side_set = set(cand.sides)
    for v in range(g.vertex_count):
        color = "#222222" if v in side_set else "#cc3333"
        elements.append(_circle(pos[v], 0.018 if v in side_set else 0.014, color))
    return svg_document(elements)


def render_tiling_with_graph_svg(
    tiles: Mapping[int, Sequence[tuple[float, float]]], cand: CandidatePair
) -> str:
    """Tiling with the overlaid adjacency diagram."""
    elements = [_polygon(((0, 0), (1, 0), (1, 1), (0, 1)), "#ffffff", "#000000", 0.006)]
    for i, t in enumerate(sorted(tiles)):
        elements.append(_polygon(tiles[t], PALETTE[i % len(PALETTE)]))
    pos = tutte_layout(cand)
    centroid = {
        t: (
            sum(p[0] for p in poly) / len(poly),
            sum(p[1] for p in poly) / len(poly),
        )
        for t, poly in tiles.items()
    }
    for t in tiles:
        pos[t] = centroid[t]
    g = cand.graph
    for u, v in g.edges:
        elements.append(_line(pos[u], pos[v], "#cc3333", 0.004))
    for v in range(g.vertex_count):
        side = v in set(cand.sides)
        elements.append(_circle(pos[v], 0.016, "#222222" if side else "#cc3333"))
    return svg_document(elements)
