"""Generation of 3-connected planar graph corpora.

The proof runs consume corpora of simple 3-connected planar graphs with a
degree floor (the apexed tiling graphs).  An external generator can
produce these; this module provides a self-contained alternative:

1. all plane triangulations on n vertices are built from the tetrahedron
   by vertex splitting (the inverse of edge contraction, under which
   triangulations are closed), deduplicating by canonical code;
2. every 3-connected planar graph with minimum degree d extends to a
   triangulation with minimum degree d by adding face chords, so deleting
   edges from those triangulations - keeping 3-connectivity and the
   degree floor at every step - reaches the whole class.

Everything is deterministic; output order is sorted by canonical code.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Optional

from .planegraph import PlaneGraph, canonical_code, check_three_connected

Rotation = tuple[tuple[int, ...], ...]

K4_ROTATION: Rotation = ((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1))


def _canon(rotation: Rotation) -> bytes:
    return canonical_code(PlaneGraph(rotation))


def split_vertex(rotation: Rotation, w: int, i: int, j: int) -> Rotation:
    """Split vertex w between rotation positions i and j (i != j).

    The two split corners keep both halves; the new vertex receives the
    arc j..i of w's rotation.  Inverse of contracting the new edge.
    """
    rot_w = rotation[w]
    d = len(rot_w)
    new = len(rotation)
    seg_u = [rot_w[(i + t) % d] for t in range((j - i) % d + 1)]
    seg_v = [rot_w[(j + t) % d] for t in range((i - j) % d + 1)]
    xi, xj = rot_w[i], rot_w[j]
    out = list(rotation)
    out[w] = tuple(seg_u) + (new,)
    for x in seg_v[1:-1]:
        out[x] = tuple(new if y == w else y for y in rotation[x])
    rx = rotation[xi]
    p = rx.index(w)
    out[xi] = rx[:p] + (w, new) + rx[p + 1 :]
    rx = rotation[xj]
    p = rx.index(w)
    out[xj] = rx[:p] + (new, w) + rx[p + 1 :]
    out.append(tuple(seg_v) + (w,))
    return tuple(out)


def triangulations(n: int) -> list[Rotation]:
    """All plane triangulations on n >= 4 vertices, one per isomorphism
    class (reflection included), sorted by canonical code."""
    if n < 4:
        raise ValueError("triangulations need at least 4 vertices")
    level: dict[bytes, Rotation] = {_canon(K4_ROTATION): K4_ROTATION}
    for _ in range(n - 4):
        nxt: dict[bytes, Rotation] = {}
        for rotation in level.values():
            for w, rot_w in enumerate(rotation):
                d = len(rot_w)
                for i in range(d):
                    for j in range(i + 1, d):
                        child = split_vertex(rotation, w, i, j)
                        code = _canon(child)
                        if code not in nxt:
                            nxt[code] = child
        level = nxt
    return [level[c] for c in sorted(level)]


def delete_edge(rotation: Rotation, a: int, b: int) -> Rotation:
    out = list(rotation)
    out[a] = tuple(v for v in rotation[a] if v != b)
    out[b] = tuple(v for v in rotation[b] if v != a)
    return tuple(out)


def _three_connected(rotation: Rotation) -> bool:
    return check_three_connected(PlaneGraph(rotation))


def deletion_closure(
    roots: Iterable[Rotation],
    min_degree: int,
    keep: Optional[Callable[[Rotation], bool]] = None,
) -> dict[bytes, Rotation]:
    """All 3-connected plane graphs reachable from the roots by edge
    deletions that preserve the degree floor and an optional monotone
    ``keep`` predicate.  Keyed by canonical code."""
    seen: dict[bytes, Rotation] = {}
    stack: list[Rotation] = []
    for rotation in roots:
        if min(len(r) for r in rotation) < min_degree:
            continue
        if keep is not None and not keep(rotation):
            continue
        code = _canon(rotation)
        if code not in seen:
            seen[code] = rotation
            stack.append(rotation)
    while stack:
        rotation = stack.pop()
        for a, rot_a in enumerate(rotation):
            if len(rot_a) <= min_degree:
                continue
            for b in rot_a:
                if b < a or len(rotation[b]) <= min_degree:
                    continue
                child = delete_edge(rotation, a, b)
                if keep is not None and not keep(child):
                    continue
                if not _three_connected(child):
                    continue
                code = _canon(child)
                if code not in seen:
                    seen[code] = child
                    stack.append(child)
    return seen


def polyhedral_graphs(n: int, min_degree: int = 3, min_deg4_vertices: int = 0) -> list[PlaneGraph]:
    """All simple 3-connected planar graphs on n vertices with the given
    degree floor, optionally requiring a count of degree >= 4 vertices
    (both constraints are monotone under edge deletion)."""

    def keep(rotation: Rotation) -> bool:
        return sum(1 for r in rotation if len(r) >= 4) >= min_deg4_vertices

    roots = triangulations(n)
    found = deletion_closure(roots, min_degree, keep if min_deg4_vertices else None)
    return [PlaneGraph(found[c]) for c in sorted(found)]


def apexed_corpus(n_tiles: int, min_tile_degree: int = 4) -> list[PlaneGraph]:
    """Corpus of apexed candidate graphs for a run with n tiles.

    The apexed graph has n + 5 vertices: n tiles, four side vertices and
    the apex.  Apex and sides always have degree >= 4 in a graph arising
    from a tiling, so corpora with triangle tiles still require five
    vertices of degree >= 4.
    """
    n_vertices = n_tiles + 5
    if min_tile_degree >= 4:
        return polyhedral_graphs(n_vertices, min_degree=4)
    return polyhedral_graphs(n_vertices, min_degree=3, min_deg4_vertices=5)


def iter_corpus_counts(graphs: Iterable[PlaneGraph]) -> Iterator[tuple[int, int]]:
    counts: dict[int, int] = {}
    for g in graphs:
        counts[g.vertex_count] = counts.get(g.vertex_count, 0) + 1
    yield from sorted(counts.items())
