"""Hand-encoded plane graphs used across the test suite.

Rotation systems below were derived by drawing each tiling (or solid) on
paper and reading neighbour order counter-clockwise at every vertex.
Side-vertex convention for tiling graphs: 0 = bottom, 1 = right,
2 = top, 3 = left, so the S-cycle is (0, 1, 2, 3).
"""

from tilesearch.planegraph import PlaneGraph, plane_graph

SIDES = (0, 1, 2, 3)

K4 = plane_graph([(1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)])

CUBE = plane_graph(
    [
        (1, 4, 3),
        (2, 5, 0),
        (3, 6, 1),
        (2, 0, 7),
        (5, 7, 0),
        (6, 4, 1),
        (2, 7, 5),
        (6, 3, 4),
    ]
)

# Apex 0 over the square 1-2-3-4, apex drawn inside the base face.
SQUARE_PYRAMID = plane_graph(
    [
        (1, 2, 3, 4),
        (2, 0, 4),
        (3, 0, 1),
        (4, 0, 2),
        (3, 1, 0),
    ]
)

# Pinwheel tiling of a square: four congruent rectangles around a centre
# square.  Tiles: 4 = top-left, 5 = right, 6 = bottom, 7 = left, 8 = centre.
PINWHEEL = plane_graph(
    [
        (3, 4, 5, 1),
        (0, 5, 6, 2),
        (1, 6, 7, 3),
        (4, 0, 2, 7),
        (0, 3, 7, 8, 5),
        (0, 4, 8, 6, 1),
        (1, 5, 8, 7, 2),
        (8, 4, 3, 2, 6),
        (5, 4, 7, 6),
    ]
)

# Two congruent right trapezoids tiling a 2 x 1 rectangle, cut by the
# slanted segment from (1.25, 0) to (0.75, 1).  Tiles: 4 = left, 5 = right.
# Angle cycle of each tile is (right, acute, obtuse, right).
TRAPEZOID_PAIR = plane_graph(
    [
        (1, 5, 4, 3),
        (2, 5, 0),
        (3, 4, 5, 1),
        (4, 2, 0),
        (5, 2, 3, 0),
        (1, 2, 4, 0),
    ]
)


def strip_graph(n: int) -> PlaneGraph:
    """Vertical-strip tiling of the unit square by n rectangles.

    Tiles 4 .. n+3 run left to right.
    """
    if n < 1:
        raise ValueError("need at least one strip")
    if n == 1:
        # single tile adjacent to all four sides
        return plane_graph(
            [
                (1, 4, 3),
                (2, 4, 0),
                (3, 4, 1),
                (4, 2, 0),
                (1, 2, 3, 0),
            ]
        )
    tiles = list(range(4, 4 + n))
    rot = [None] * (4 + n)
    rot[0] = tuple([1] + tiles[::-1] + [3])
    rot[1] = (2, tiles[-1], 0)
    rot[2] = tuple([3] + tiles + [1])
    rot[3] = (tiles[0], 2, 0)
    for i, t in enumerate(tiles):
        left = tiles[i - 1] if i > 0 else 3
        right = tiles[i + 1] if i < n - 1 else 1
        rot[t] = (right, 2, left, 0)
    return plane_graph(rot)


def apexed(g: PlaneGraph, sides=SIDES) -> PlaneGraph:
    """Add an apex vertex adjacent to the S-cycle, inside the apex face."""
    apex = g.vertex_count
    cycle = next(
        f for f in g.faces if len(f) == 4 and set(f) == set(sides)
    )
    rot = [list(r) for r in g.rotation]
    for i, a in enumerate(cycle):
        b = cycle[(i + 1) % 4]
        rot[b].insert(rot[b].index(a) + 1, apex)
    rot.append(list(reversed(cycle)))
    return plane_graph(rot)


def fixture_candidate(g: PlaneGraph, sides=SIDES):
    """The candidate pair whose distinguished cycle is the fixture's own
    side cycle (apexing can make other vertices eligible too)."""
    from tilesearch.planegraph import canonical_code, extract_candidates

    ap = apexed(g, sides)
    want = canonical_code(ap, root=ap.vertex_count - 1)
    for cand in extract_candidates(ap):
        if cand.code == want:
            return cand
    raise AssertionError("fixture candidate lost in extraction")
