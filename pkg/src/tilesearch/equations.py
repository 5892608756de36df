"""Builders for the geometric equation system of a candidate.

Variables (all exact rationals; angles in units of pi):

* ``alpha_j`` for the k model-tile angles;
* ``t_j`` for the k model-tile side lengths (congruent modes);
* one length per graph edge that carries a segment of the drawing, i.e.
  every tile-tile and tile-side edge (congruent modes);
* the rectangle ratio ``r`` (rectangle mode; squares fix r = 1).

Angle rows come from completed tiling-vertices, side-run rows from
completed tiles, boundary rows from the four sides of the frame.  The
quadrilateral area/diagonal equations are nonlinear and are only applied
as a numeric guard on sampled solutions; exact reasoning never depends
on them.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .linsys import Bound, LinearSystem
from .planegraph import APEX, CandidatePair, FaceInfo, classify_faces
from .shapes import EXACT_RANGE, PLAIN, RIGHT, TileShape

F = Fraction

FACE_TARGET = {"corner": F(1, 2), "side": F(1), "interior": F(2)}

mpmath.mp.prec = 80  # > 64-bit mantissa for guard evaluation


@dataclass(frozen=True)
class VarMap:
    """Integer variable ids for one search problem."""

    k: int
    edge_index: dict[tuple[int, int], int]
    with_lengths: bool
    with_ratio: bool

    def angle(self, j: int) -> int:
        return j

    def side(self, j: int) -> int:
        return self.k + j

    def edge(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        return 2 * self.k + self.edge_index[key]

    @property
    def ratio(self) -> int:
        return 2 * self.k + len(self.edge_index)

    def all_guard_vars(self) -> list[int]:
        out = [self.angle(j) for j in range(self.k)]
        if self.with_lengths:
            out += [self.side(j) for j in range(self.k)]
        if self.with_ratio:
            out.append(self.ratio)
        return out


@dataclass(frozen=True)
class Topology:
    """Face/slot structure of a candidate, precomputed for the search."""

    cand: CandidatePair
    faces: tuple[FaceInfo, ...]
    tile_nbrs: dict[int, tuple[int, ...]]
    tile_faces: dict[int, tuple[int, ...]]
    face_slots: dict[int, tuple[tuple[int, int], ...]]  # face -> ((tile, pos), ...)
    side_tiles: tuple[tuple[int, ...], ...]

    @property
    def targets(self) -> dict[int, Fraction]:
        return {
            f.index: FACE_TARGET[f.kind]
            for f in self.faces
            if f.kind in FACE_TARGET
        }


def build_topology(cand: CandidatePair) -> Topology:
    g = cand.graph
    faces = classify_faces(cand)
    face_of = g.face_of_directed_edge
    side_set = set(cand.sides)
    tile_nbrs: dict[int, tuple[int, ...]] = {}
    tile_faces: dict[int, tuple[int, ...]] = {}
    face_slots: dict[int, list[tuple[int, int]]] = {f.index: [] for f in faces}
    for t in cand.tiles:
        rot = g.rotation[t]
        tile_nbrs[t] = rot
        incident = tuple(face_of[(u, t)] for u in rot)
        tile_faces[t] = incident
        for pos, f in enumerate(incident):
            face_slots[f].append((t, pos))
    # order slots by the face boundary cycle
    ordered: dict[int, tuple[tuple[int, int], ...]] = {}
    for f in faces:
        slot_by_tile = {t: (t, pos) for t, pos in face_slots[f.index]}
        ordered[f.index] = tuple(slot_by_tile[t] for t in f.boundary if t in slot_by_tile)
    side_tiles = tuple(
        tuple(u for u in g.rotation[s] if u not in side_set) for s in cand.sides
    )
    return Topology(cand, faces, tile_nbrs, tile_faces, ordered, side_tiles)


def make_varmap(topo: Topology, shape: TileShape, mode: str) -> VarMap:
    with_lengths = mode in ("square", "rectangle")
    edge_index: dict[tuple[int, int], int] = {}
    if with_lengths:
        side_set = set(topo.cand.sides)
        for u, v in topo.cand.graph.edges:
            if u in side_set and v in side_set:
                continue
            edge_index[(u, v)] = len(edge_index)
    return VarMap(shape.k, edge_index, with_lengths, mode == "rectangle")


def angle_bound(label: str, floor: Optional[Fraction] = None) -> Bound:
    lo, lo_s, hi, hi_s = EXACT_RANGE[label]
    if floor is not None and (lo < floor or (lo == floor and not lo_s)):
        lo, lo_s = floor, True
    return Bound(lo, lo_s, hi, hi_s)


def base_system(
    topo: Topology,
    shape: TileShape,
    varmap: VarMap,
    mode: str,
    angle_floor: Optional[Fraction] = None,
) -> LinearSystem:
    """System with variable bounds, the tile angle-sum row and (for
    congruent modes) the four boundary rows."""
    sys_ = LinearSystem()
    for j, label in enumerate(shape.labels):
        sys_.add_variable(varmap.angle(j), angle_bound(label, angle_floor))
    if varmap.with_lengths:
        positive = Bound(lo=F(0), lo_strict=True)
        for j in range(shape.k):
            sys_.add_variable(varmap.side(j), positive)
        for eid in varmap.edge_index.values():
            sys_.add_variable(2 * varmap.k + eid, positive)
        if varmap.with_ratio:
            sys_.add_variable(varmap.ratio, positive)
    sys_.add_equation(
        {varmap.angle(j): F(1) for j in range(shape.k)}, F(shape.k - 2)
    )
    if varmap.with_lengths:
        for row, const in boundary_side_equations(topo, varmap, mode):
            sys_.add_equation(row, const)
    return sys_


def boundary_side_equations(
    topo: Topology, varmap: VarMap, mode: str
) -> list[tuple[dict[int, Fraction], Fraction]]:
    """One row per frame side: its tile segments sum to the side length.

    Squares have unit sides; rectangles give sides 0 and 2 unit length
    and sides 1 and 3 the ratio variable.
    """
    rows = []
    for kside, tiles in enumerate(topo.side_tiles):
        s = topo.cand.sides[kside]
        coeffs = {varmap.edge(s, t): F(1) for t in tiles}
        if mode == "rectangle" and kside % 2 == 1:
            coeffs[varmap.ratio] = F(-1)
            rows.append((coeffs, F(0)))
        else:
            rows.append((coeffs, F(1)))
    return rows


def angle_vertex_equation(
    face_target: Fraction, entries: Sequence[tuple[int, object]], varmap: VarMap
) -> tuple[dict[int, Fraction], Fraction]:
    """Row for a completed tiling-vertex.

    ``entries`` holds (tile, assigned) pairs where assigned is a model
    vertex index or the plain mark; plain contributes the constant pi.
    """
    coeffs: dict[int, Fraction] = {}
    const = face_target
    for _, assigned in entries:
        if assigned == PLAIN:
            const -= 1
        else:
            var = varmap.angle(assigned)
            coeffs[var] = coeffs.get(var, F(0)) + 1
    return coeffs, const


def side_run_equations(
    topo: Topology,
    varmap: VarMap,
    tile: int,
    slot_values: Sequence[object],
    k: int,
) -> list[tuple[dict[int, Fraction], Fraction]]:
    """Rows for a completed tile: each run of boundary segments between
    consecutive model corners equals the matching model side length.

    ``slot_values[i]`` is the model index (or plain) at the tile's i-th
    corner; corner i sits between the segments shared with neighbours
    i and i+1 in rotation order.
    """
    nbrs = topo.tile_nbrs[tile]
    d = len(nbrs)
    anchors = [(pos, val) for pos, val in enumerate(slot_values) if val != PLAIN]
    if len(anchors) != k:
        raise ValueError(f"tile {tile} incomplete: {len(anchors)} anchors, need {k}")
    rows = []
    for a in range(k):
        pos_i, x = anchors[a]
        pos_j, y = anchors[(a + 1) % k]
        if (y - x) % k == 1:
            side = x
        elif (x - y) % k == 1:
            side = y
        else:
            raise ValueError(f"tile {tile}: anchors not cyclically consecutive")
        coeffs: dict[int, Fraction] = {}
        m = (pos_i + 1) % d
        while True:
            var = varmap.edge(tile, nbrs[m])
            coeffs[var] = coeffs.get(var, F(0)) + 1
            if m == pos_j:
                break
            m = (m + 1) % d
        coeffs[varmap.side(side)] = coeffs.get(varmap.side(side), F(0)) - 1
        rows.append((coeffs, F(0)))
    return rows


# ---------------------------------------------------------------------------
# special quadrilateral labelings


AROR = ("a", RIGHT, "o", RIGHT)
ARRO = ("a", RIGHT, RIGHT, "o")

ACUTE_CORNER_BRANCH = (F(1, 3), F(1, 4))


def aror_branch_values(shape: TileShape) -> Optional[tuple[Fraction, ...]]:
    """When a two-right-angle quadrilateral places its acute vertex on a
    frame corner, the acute angle can only be 1/3 or 1/4 (units of pi)."""
    if shape.k == 4 and shape.labels == AROR:
        return ACUTE_CORNER_BRANCH
    return None


def arro_exact_rows(
    shape: TileShape, varmap: VarMap, alpha1: Fraction
) -> list[tuple[dict[int, Fraction], Fraction]]:
    """Length relations of the arro trapezoid that become exact linear
    rows once the acute angle is pinned to a value with rational cosine
    or sine: t1 = t3 + t4*cos(a1) and t2 = t4*sin(a1)."""
    if shape.labels != ARRO:
        return []
    rows = []
    cos = _rational_cos(alpha1)
    if cos is not None:
        rows.append((
            {varmap.side(0): F(1), varmap.side(2): F(-1), varmap.side(3): -cos},
            F(0),
        ))
    sin = _rational_cos(F(1, 2) - alpha1)
    if sin is not None:
        rows.append(({varmap.side(1): F(1), varmap.side(3): -sin}, F(0)))
    return rows


def _rational_cos(x: Fraction) -> Optional[Fraction]:
    # cos(x*pi) is rational only at x = 0, 1/3, 1/2, 2/3, 1 within [0, 1]
    table = {F(0): F(1), F(1, 3): F(1, 2), F(1, 2): F(0), F(2, 3): F(-1, 2), F(1): F(-1)}
    return table.get(x)


def aror_quarter_bounds(area: float) -> tuple[float, float]:
    """Numeric bounds sqrt(2A) < t1,t4 <= 2*sqrt(A) for the aror tile
    whose acute angle is pi/4."""
    return (float(mpmath.sqrt(2 * mpmath.mpf(area))), float(2 * mpmath.sqrt(mpmath.mpf(area))))


# ---------------------------------------------------------------------------
# numeric guard


def _to_mpf(x: Fraction) -> mpmath.mpf:
    return mpmath.mpf(x.numerator) / x.denominator


def guard_violation(
    values: dict[int, Fraction],
    shape: TileShape,
    varmap: VarMap,
    n_tiles: int,
    square: bool,
) -> float:
    """Largest violation of the quadrilateral area and diagonal equations
    (plus pinned special-labeling relations) at one exact sample point."""
    pi = mpmath.pi
    al = [_to_mpf(values[varmap.angle(j)]) * pi for j in range(4)]
    t = [_to_mpf(values[varmap.side(j)]) for j in range(4)]
    r = mpmath.mpf(1) if square or not varmap.with_ratio else _to_mpf(values[varmap.ratio])
    double_area = 2 * r / n_tiles
    worst = mpmath.mpf(0)
    worst = max(worst, abs(t[0] * t[1] * mpmath.sin(al[1]) + t[2] * t[3] * mpmath.sin(al[3]) - double_area))
    worst = max(worst, abs(t[1] * t[2] * mpmath.sin(al[2]) + t[3] * t[0] * mpmath.sin(al[0]) - double_area))
    d1 = t[0] ** 2 + t[1] ** 2 - 2 * t[0] * t[1] * mpmath.cos(al[1])
    d2 = t[2] ** 2 + t[3] ** 2 - 2 * t[2] * t[3] * mpmath.cos(al[3])
    worst = max(worst, abs(d1 - d2))
    e1 = t[1] ** 2 + t[2] ** 2 - 2 * t[1] * t[2] * mpmath.cos(al[2])
    e2 = t[3] ** 2 + t[0] ** 2 - 2 * t[3] * t[0] * mpmath.cos(al[0])
    worst = max(worst, abs(e1 - e2))
    if shape.labels == AROR and values[varmap.angle(0)] == F(1, 4):
        area = r / n_tiles
        lo = mpmath.sqrt(2 * area)
        hi = 2 * mpmath.sqrt(area)
        for j in (0, 3):
            worst = max(worst, lo - t[j], t[j] - hi)
    if shape.labels == ARRO:
        a1 = al[0]
        worst = max(worst, abs(t[0] - t[2] - t[3] * mpmath.cos(a1)))
        worst = max(worst, abs(t[1] - t[3] * mpmath.sin(a1)))
    return float(worst)


def nonlinear_guard(
    sys_: LinearSystem,
    shape: TileShape,
    varmap: VarMap,
    n_tiles: int,
    square: bool,
    tau: float,
    max_dim: int = 2,
) -> bool:
    """True = keep, False = discard.

    Discards only when every sampled solution of the affine space
    violates some nonlinear relation by more than tau; an empty sample
    set keeps the node (never discard on uncertainty).
    """
    if shape.k != 4 or not varmap.with_lengths:
        return True
    points = sys_.sample_points(max_dim=max_dim)
    if not points:
        return True
    best = min(
        guard_violation(p, shape, varmap, n_tiles, square) for p in points
    )
    return best <= tau


def similar_tile_guard(
    topo: Topology,
    sys_: LinearSystem,
    shape: TileShape,
    varmap: VarMap,
    slot_values: dict[tuple[int, int], object],
) -> bool:
    """Length-closure guard for equiangular triangles; True = keep.

    Equal angles make triangle tiles similar, so once every model angle
    is pinned each tile's sides are a common scale times the sines of
    its corner angles.  Segment lengths and per-tile scales then satisfy
    a linear system (runs between corners equal the opposite-side value;
    frame sides sum to one) whose feasibility over positive values is
    necessary for a drawing.  Only applied when fully pinned; decided by
    an LP with a generous margin, keeping on any solver doubt.
    """
    if shape.k != 3:
        return True
    angles = []
    for j in range(3):
        val = sys_.pinned(varmap.angle(j))
        if val is None:
            return True
        angles.append(math.sin(math.pi * float(val)))
    side_set = set(topo.cand.sides)
    edge_idx: dict[tuple[int, int], int] = {}
    for u, v in topo.cand.graph.edges:
        if u in side_set and v in side_set:
            continue
        edge_idx[(u, v)] = len(edge_idx)
    n_edges = len(edge_idx)
    tiles = topo.cand.tiles
    scale_idx = {t: n_edges + i for i, t in enumerate(tiles)}
    n_vars = n_edges + len(tiles)

    def eid(a: int, b: int) -> int:
        return edge_idx[(a, b) if a < b else (b, a)]

    rows: list[list[float]] = []
    rhs: list[float] = []
    for t in tiles:
        nbrs = topo.tile_nbrs[t]
        d = len(nbrs)
        anchors = [
            (pos, slot_values[(t, pos)])
            for pos in range(d)
            if slot_values[(t, pos)] != "p"
        ]
        if len(anchors) != 3:
            return True
        for a in range(3):
            pos_i, _ = anchors[a]
            pos_j, _ = anchors[(a + 1) % 3]
            third = anchors[(a + 2) % 3][1]
            row = [0.0] * n_vars
            m = (pos_i + 1) % d
            while True:
                row[eid(t, nbrs[m])] += 1.0
                if m == pos_j:
                    break
                m = (m + 1) % d
            row[scale_idx[t]] = -angles[third]
            rows.append(row)
            rhs.append(0.0)
    for kside, side_tiles in enumerate(topo.side_tiles):
        s = topo.cand.sides[kside]
        row = [0.0] * n_vars
        for t in side_tiles:
            row[eid(s, t)] += 1.0
        rows.append(row)
        rhs.append(1.0)
    try:
        from scipy.optimize import linprog

        res = linprog(
            c=np.zeros(n_vars),
            A_eq=np.asarray(rows),
            b_eq=np.asarray(rhs),
            bounds=[(1e-7, None)] * n_vars,
            method="highs",
        )
    except Exception:
        return True
    if res.status == 2:  # proven infeasible
        return False
    return True
