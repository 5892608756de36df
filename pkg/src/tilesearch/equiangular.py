"""Equiangular-variant pipeline: angle-only searches over triangle and
quadrilateral tiles, survivor enumeration, curated verdicts and a
best-effort numeric realizer.

Side lengths are ignored in this variant, so the exact reasoning is an
angle system per candidate.  Survivors are candidate pairs admitting at
least one labeling with a complete, consistent, bound-feasible
assignment.  A curated data file records survivors that a geometric
check rules out by hand; the realizer below produces supporting numeric
evidence (coordinates or a failure report) but never overrides the
survivor computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .corpusgen import apexed_corpus
from .equations import Topology, build_topology
from .filters import apply_filters
from .linsys import LinearSystem
from .planegraph import CandidatePair, CORNER, SIDE, INTERIOR, extract_candidates
from .search import Certificate, SearchConfig, run_search
from .shapes import PLAIN, TileShape, enumerate_labelings

F = Fraction

CURATED_FILE = "equiangular_curated_n5.txt"

CORNER_XY = {0: (1.0, 0.0), 1: (1.0, 1.0), 2: (0.0, 1.0), 3: (0.0, 0.0)}
SIDE_AXIS = {0: ("x", 0.0), 1: ("y", 1.0), 2: ("x", 1.0), 3: ("y", 0.0)}


@dataclass
class SurvivorReport:
    candidate: CandidatePair
    certificates: list[Certificate]

    @property
    def code_hex(self) -> str:
        return self.candidate.id_hex()


@dataclass
class EquiangularRun:
    n: int
    k: int
    candidates_seen: int
    survivors: list[SurvivorReport]
    curated_invalid: list[str]
    certificates: list[Certificate] = field(default_factory=list)

    @property
    def survivor_count(self) -> int:
        return len(self.survivors)

    @property
    def tiling_count(self) -> int:
        return self.survivor_count - len(self.curated_invalid)


def load_curated(k: int) -> dict[str, str]:
    """Curated verdicts: candidate code hex -> note."""
    out: dict[str, str] = {}
    text = resources.files("tilesearch.data").joinpath(CURATED_FILE).read_text()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        code, kk, verdict, note = line.split(None, 3)
        if int(kk) == k and verdict == "invalid":
            out[code] = note
    return out


def run_equiangular(
    n: int,
    k: int,
    config: SearchConfig = SearchConfig(),
    corpus=None,
    curated: Optional[dict[str, str]] = None,
) -> EquiangularRun:
    """Full equiangular pipeline for n tiles with k sides each."""
    if k not in (3, 4):
        raise ValueError("equiangular runs support k in {3, 4}")
    if corpus is None:
        corpus = apexed_corpus(n, min_tile_degree=3)
    cands: dict[bytes, CandidatePair] = {}
    for g in corpus:
        for c in extract_candidates(g):
            cands.setdefault(c.code, c)
    shapes = enumerate_labelings(k, "equiangular")
    survivors: list[SurvivorReport] = []
    all_certs: list[Certificate] = []
    for code in sorted(cands):
        cand = cands[code]
        report, constraints = apply_filters(cand, k, "equiangular")
        if report.verdict == "discard":
            continue
        topo = build_topology(cand)
        certs = []
        for shape in shapes:
            cert = run_search(cand, shape, "equiangular", config, constraints, topo)
            if cert.outcome == "inconclusive":
                raise RuntimeError(
                    f"inconclusive equiangular search: {cand.id_hex()} {shape.name}"
                )
            if cert.outcome == "survived":
                certs.append(cert)
        all_certs.extend(certs)
        if certs:
            survivors.append(SurvivorReport(cand, certs))
    if curated is None:
        curated = load_curated(k)
    survivor_codes = {s.code_hex for s in survivors}
    curated_hits = sorted(c for c in curated if c in survivor_codes)
    return EquiangularRun(
        n=n,
        k=k,
        candidates_seen=len(cands),
        survivors=survivors,
        curated_invalid=curated_hits,
        certificates=all_certs,
    )


# ---------------------------------------------------------------------------
# numeric realization


@dataclass
class Realization:
    status: str  # "realized" | "unrealized" | "undetermined"
    residual: float
    tiles: dict[int, list[tuple[float, float]]] = field(default_factory=dict)
    angles: dict[int, float] = field(default_factory=dict)  # model angle values (radians)
    tan_smallest: Optional[float] = None
    note: str = ""


def _replay_angle_system(topo: Topology, shape: TileShape, assignment) -> LinearSystem:
    from .equations import angle_vertex_equation, make_varmap

    varmap = make_varmap(topo, shape, "equiangular")
    sys_ = LinearSystem()
    from .equations import angle_bound

    for j, label in enumerate(shape.labels):
        sys_.add_variable(varmap.angle(j), angle_bound(label))
    sys_.add_equation({varmap.angle(j): F(1) for j in range(shape.k)}, F(shape.k - 2))
    by_face: dict[int, list] = {}
    for tile, face, pos, value in assignment:
        by_face.setdefault(face, []).append((tile, value))
    for f in topo.faces:
        if f.index not in by_face:
            continue
        target = topo.targets[f.index]
        coeffs, const = angle_vertex_equation(target, by_face[f.index], varmap)
        if not sys_.add_equation(coeffs, const):
            raise ValueError("assignment replay became inconsistent")
    return sys_


def _parse_assignment(record: dict) -> list[tuple[int, int, int, object]]:
    out = []
    for tile, face, pos, value in record["assignment"]:
        out.append((tile, face, pos, PLAIN if value == PLAIN else int(value)))
    return out


def realize_numeric(
    cand: CandidatePair,
    shape: TileShape,
    survivor_record: dict,
    n_starts: int = 12,
    tol: float = 1e-8,
    pin_alpha: Optional[float] = None,
    partial_walk: bool = False,
) -> Realization:
    """Attempt a coordinate realization of a surviving assignment.

    Tiling-vertices on the frame are constrained to their side lines,
    interior ones roam the plane; unpinned model angles are free
    parameters within their label ranges.  Starts order side points by
    their combinatorial order along each side (both directions) and seed
    interior points barycentrically; every converged solution must pass
    convexity, containment, edge-length and area validation before it
    counts as a realization.
    """
    topo = build_topology(cand)
    assignment = _parse_assignment(survivor_record)
    sys_ = _replay_angle_system(topo, shape, assignment)
    k = shape.k

    from .shapes import EXACT_RANGE

    pinned: dict[int, float] = {}
    free_angles: list[int] = []
    for j in range(k):
        val = sys_.pinned(j)
        lo, _, hi, _ = EXACT_RANGE[shape.labels[j]]
        if val is not None:
            pinned[j] = float(val) * math.pi
        elif lo == hi:
            pinned[j] = float(lo) * math.pi
        else:
            free_angles.append(j)

    slot_angle: dict[tuple[int, int], object] = {}
    for tile, face, pos, value in assignment:
        slot_angle[(tile, pos)] = value

    faces_by_index = {f.index: f for f in topo.faces}
    park: list[tuple[int, str]] = []
    for f in topo.faces:
        if f.kind == SIDE:
            park.append((f.index, "side"))
        elif f.kind == INTERIOR:
            park.append((f.index, "interior"))

    def unpack(x: np.ndarray):
        pts: dict[int, tuple[float, float]] = {}
        for f in topo.faces:
            if f.kind == CORNER:
                pts[f.index] = CORNER_XY[f.corner]
        i = 0
        for fidx, kind in park:
            f = faces_by_index[fidx]
            if kind == "side":
                axis, fixed = SIDE_AXIS[f.side]
                v = x[i]
                i += 1
                pts[fidx] = (v, fixed) if axis == "x" else (fixed, v)
            else:
                pts[fidx] = (x[i], x[i + 1])
                i += 2
        ang = dict(pinned)
        if free_angles:
            for j, aj in zip(free_angles, x[len(x) - len(free_angles):]):
                ang[j] = aj
        return pts, ang

    def residuals(x: np.ndarray) -> np.ndarray:
        pts, ang = unpack(x)
        out = []
        for t in cand.tiles:
            incident = topo.tile_faces[t]
            d = len(incident)
            for pos in range(d):
                value = slot_angle[(t, pos)]
                target = math.pi if value == PLAIN else ang[value]
                p = np.array(pts[incident[pos]])
                a = np.array(pts[incident[(pos - 1) % d]]) - p
                b = np.array(pts[incident[(pos + 1) % d]]) - p
                na, nb = np.hypot(*a), np.hypot(*b)
                if na < 1e-12 or nb < 1e-12:
                    out.append(10.0)
                    continue
                cross = a[0] * b[1] - a[1] * b[0]
                dot = float(np.dot(a, b))
                theta = math.atan2(abs(cross), dot)
                out.append(theta - target)
        return np.asarray(out)

    side_order = _side_face_order(topo)
    corner_graph = _corner_adjacency(topo, cand)

    def initial_guess(start: int) -> np.ndarray:
        reverse = start % 2 == 1
        frac = ((start // 2) + 1) / (n_starts // 2 + 2)
        seed_pts: dict[int, tuple[float, float]] = {}
        for f in topo.faces:
            if f.kind == CORNER:
                seed_pts[f.index] = CORNER_XY[f.corner]
        for kside, ordered in enumerate(side_order):
            m = len(ordered)
            seq = list(reversed(ordered)) if reverse else ordered
            ends = _side_endpoints(kside)
            for i, fidx in enumerate(seq):
                t_par = (i + 1) / (m + 1)
                seed_pts[fidx] = (
                    ends[0][0] + t_par * (ends[1][0] - ends[0][0]),
                    ends[0][1] + t_par * (ends[1][1] - ends[0][1]),
                )
        interior = [fidx for fidx, kind in park if kind == "interior"]
        for fidx in interior:
            seed_pts[fidx] = (0.5, 0.5)
        for _ in range(60):
            for fidx in interior:
                nbrs = corner_graph.get(fidx, ())
                if nbrs:
                    xs = [seed_pts[n][0] for n in nbrs]
                    ys = [seed_pts[n][1] for n in nbrs]
                    seed_pts[fidx] = (sum(xs) / len(xs), sum(ys) / len(ys))
        x0 = []
        for fidx, kind in park:
            f = faces_by_index[fidx]
            if kind == "side":
                axis, _ = SIDE_AXIS[f.side]
                x0.append(seed_pts[fidx][0] if axis == "x" else seed_pts[fidx][1])
            else:
                x0.extend(seed_pts[fidx])
        for j in free_angles:
            lo, _, hi, _ = _angle_range(shape.labels[j])
            x0.append(math.pi * (lo + (hi - lo) * frac))
        return np.asarray(x0)

    lower: list[float] = []
    upper: list[float] = []
    for fidx, kind in park:
        if kind == "side":
            lower.append(1e-3)
            upper.append(1.0 - 1e-3)
        else:
            lower.extend([1e-3, 1e-3])
            upper.extend([1.0 - 1e-3, 1.0 - 1e-3])
    for j in free_angles:
        lo, _, hi, _ = _angle_range(shape.labels[j])
        lower.append(math.pi * lo)
        upper.append(math.pi * hi)
    bounds_arr = (np.asarray(lower), np.asarray(upper))

    edge_floor = 0.01

    def hinge(x: np.ndarray) -> np.ndarray:
        pts, _ = unpack(x)
        out = []
        for t in cand.tiles:
            incident = topo.tile_faces[t]
            d = len(incident)
            for pos in range(d):
                p = pts[incident[pos]]
                q = pts[incident[(pos + 1) % d]]
                gap = edge_floor - math.hypot(q[0] - p[0], q[1] - p[1])
                out.append(max(0.0, gap) / edge_floor)
        return np.asarray(out)

    def attempt(x0: np.ndarray, pin_value: Optional[float], use_hinge: bool = True):
        """pin_value is a raw target for the first free model angle."""

        def raw(x):
            base = list(residuals(x))
            if pin_value is not None and free_angles:
                _, ang = unpack(x)
                base.append(3.0 * (ang[free_angles[0]] - pin_value))
            return np.asarray(base)

        def fun(x):
            if not use_hinge:
                return raw(x)
            return np.concatenate([raw(x), hinge(x)])

        x0 = np.clip(x0, bounds_arr[0], bounds_arr[1])
        res = least_squares(fun, x0, method="trf", bounds=bounds_arr, max_nfev=4000)
        trials = [res.x]
        if len(res.fun) and float(np.max(np.abs(res.fun))) < 1e-6:
            # unbounded polish on the raw residuals; validation gates it
            polished = least_squares(
                raw, res.x, method="lm", xtol=3e-16, ftol=3e-16, gtol=3e-16, max_nfev=2000
            )
            trials.insert(0, polished.x)
        outcome: Optional[tuple[Realization, np.ndarray]] = None
        for x in trials:
            score = float(np.max(np.abs(raw(x))))
            pts, ang = unpack(x)
            tiles = {
                t: [tuple(map(float, pts[f])) for f in topo.tile_faces[t]]
                for t in cand.tiles
            }
            if score < tol:
                ok, why = _validate_drawing(tiles, cand, topo)
                if ok:
                    angles = {j: float(a) for j, a in ang.items()}
                    smallest = min(angles.values())
                    return (
                        Realization(
                            status="realized",
                            residual=score,
                            tiles=tiles,
                            angles=angles,
                            tan_smallest=math.tan(smallest),
                        ),
                        x,
                    )
                trial = Realization("unrealized", score, tiles=tiles, note=why)
            else:
                trial = Realization("unrealized", score, tiles=tiles, note="no convergent start")
            if outcome is None or trial.residual < outcome[0].residual:
                outcome = (trial, x)
        assert outcome is not None
        return outcome

    best: Optional[Realization] = None

    def consider(r: Realization) -> bool:
        nonlocal best
        if best is None or r.residual < best.residual or (
            best.note == "no convergent start" and r.note != "no convergent start"
        ):
            best = r
        return r.status == "realized"

    if len(lower) == 0:
        # fully rigid configuration: nothing to solve, just evaluate
        x = np.zeros(0)
        score = float(np.max(np.abs(residuals(x)))) if cand.tiles else 0.0
        pts, ang = unpack(x)
        tiles = {
            t: [tuple(map(float, pts[f])) for f in topo.tile_faces[t]]
            for t in cand.tiles
        }
        if score < tol:
            ok, why = _validate_drawing(tiles, cand, topo)
            if ok:
                angles = {j: float(a) for j, a in ang.items()}
                return Realization(
                    "realized", score, tiles, angles, math.tan(min(angles.values()))
                )
            return Realization("unrealized", score, tiles=tiles, note=why)
        return Realization("unrealized", score, tiles=tiles, note="rigid mismatch")

    if pin_alpha is not None:
        # the pin names the smallest tile angle; an obtuse free variable in
        # the pattern (alpha, pi/2, pi/2, pi - alpha) carries its supplement
        pin_value = pin_alpha
        if free_angles:
            _, _, hi_j, _ = EXACT_RANGE[shape.labels[free_angles[0]]]
            if hi_j > F(1, 2):
                pin_value = math.pi - pin_alpha
            free_ix = len(lower) - len(free_angles)
            lo_b, hi_b = lower[free_ix], upper[free_ix]
            if not lo_b <= pin_value <= hi_b:
                return Realization("unrealized", math.inf, note="pin outside label range")
        furthest: Optional[Realization] = None
        for s in range(n_starts):
            r, x = attempt(initial_guess(s), None)
            if r.status != "realized":
                consider(r)
                continue
            if not free_angles:
                if partial_walk:
                    return r
                if consider(r):
                    return best
                continue
            # homotopy: walk the free angle from the found value to the pin
            # in small steps, retrying without the short-edge hinge when it
            # blocks a step
            current = r.angles[free_angles[0]]
            steps = max(6, int(math.ceil(abs(pin_value - current) / 0.04)))
            walked = r
            reached = r
            for i in range(1, steps + 1):
                goal = current + (pin_value - current) * i / steps
                nxt, x2 = attempt(np.asarray(x), goal)
                if nxt.status != "realized":
                    nxt, x2 = attempt(np.asarray(x), goal, use_hinge=False)
                walked = nxt
                if walked.status != "realized":
                    break
                reached = walked
                x = x2
            if partial_walk:
                if furthest is None or _walk_key(reached, pin_value, free_angles) < _walk_key(
                    furthest, pin_value, free_angles
                ):
                    furthest = reached
                if walked.status == "realized":
                    return walked
                continue
            if consider(walked):
                return best
        if partial_walk and furthest is not None:
            return furthest
        assert best is not None
        return best
    for s in range(n_starts):
        r, _ = attempt(initial_guess(s), None)
        if consider(r):
            return best
    if free_angles:
        lo, _, hi, _ = _angle_range(shape.labels[free_angles[0]])
        for s in range(n_starts):
            frac = (s + 1) / (n_starts + 1)
            alpha = math.pi * (lo + (hi - lo) * frac)
            r, _ = attempt(initial_guess(s), alpha)
            if consider(r):
                return best
    assert best is not None
    return best


def _walk_key(r: Realization, pin_value: float, free_angles) -> float:
    """Distance of a walked realization's free angle from the pin target."""
    if not r.angles or not free_angles:
        return math.inf
    return abs(r.angles[free_angles[0]] - pin_value)


def alpha_ceiling(report: SurvivorReport, target: float = 1.45) -> float:
    """Largest smallest-angle value (radians) reachable by continuation
    across the survivor's assignments; numeric evidence for angle caps."""
    best = 0.0
    for cert in report.certificates:
        labels = _labels_of(cert.shape)
        shape = TileShape(len(labels), labels)
        for rec in cert.survivors:
            r = realize_numeric(
                report.candidate, shape, rec, pin_alpha=target, partial_walk=True
            )
            if r.status == "realized" and r.angles:
                best = max(best, min(r.angles.values()))
    return best


def _side_face_order(topo: Topology) -> list[list[int]]:
    """Side-face indices per frame side, in rotation order around the
    side vertex (the combinatorial order along the side)."""
    g = topo.cand.graph
    out: list[list[int]] = []
    by_index = {f.index: f for f in topo.faces}
    face_of = g.face_of_directed_edge
    for kside, s in enumerate(topo.cand.sides):
        seen = []
        for u in g.rotation[s]:
            fidx = face_of[(u, s)]
            f = by_index[fidx]
            if f.kind == SIDE and f.side == kside and fidx not in seen:
                seen.append(fidx)
        out.append(seen)
    return out


def _side_endpoints(kside: int) -> tuple[tuple[float, float], tuple[float, float]]:
    return CORNER_XY[(kside - 1) % 4], CORNER_XY[kside]


def _corner_adjacency(topo: Topology, cand: CandidatePair) -> dict[int, list[int]]:
    """Tiling-vertex adjacency: consecutive corners around each tile."""
    out: dict[int, list[int]] = {}
    for t in cand.tiles:
        incident = topo.tile_faces[t]
        d = len(incident)
        for i in range(d):
            a, b = incident[i], incident[(i + 1) % d]
            out.setdefault(a, []).append(b)
            out.setdefault(b, []).append(a)
    return out


def _angle_range(label: str):
    from .shapes import EXACT_RANGE

    lo, lo_s, hi, hi_s = EXACT_RANGE[label]
    pad = F(1, 50)
    lo2 = lo + pad if lo_s else lo
    hi2 = hi - pad if hi_s else hi
    return float(lo2), lo_s, float(hi2), hi_s


def _validate_drawing(tiles, cand: CandidatePair, topo: Topology) -> tuple[bool, str]:
    total = 0.0
    for t, poly in tiles.items():
        area = _signed_area(poly)
        if abs(area) < 1e-6:
            return False, f"tile {t} degenerate"
        orient = math.copysign(1.0, area)
        m = len(poly)
        for i in range(m):
            p, q, r = poly[i - 1], poly[i], poly[(i + 1) % m]
            if math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-4:
                return False, f"tile {t} collapsed edge"
            cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0])
            if cross * orient < -1e-7:
                return False, f"tile {t} not convex"
        for x, y in poly:
            if not (-1e-7 <= x <= 1 + 1e-7 and -1e-7 <= y <= 1 + 1e-7):
                return False, f"tile {t} outside frame"
        total += abs(area)
    if abs(total - 1.0) > 1e-6:
        return False, f"area sum {total:.6f}"
    return True, ""


def _signed_area(poly) -> float:
    s = 0.0
    m = len(poly)
    for i in range(m):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % m]
        s += x1 * y2 - x2 * y1
    return s / 2.0


def realize_survivor(report: SurvivorReport, **kw) -> Realization:
    """Best realization over the survivor's shapes and assignments."""
    best: Optional[Realization] = None
    for cert in report.certificates:
        labels = _labels_of(cert.shape)
        shape = TileShape(len(labels), labels)
        for rec in cert.survivors:
            r = realize_numeric(report.candidate, shape, rec, **kw)
            if r.status == "realized":
                return r
            if best is None or r.residual < best.residual:
                best = r
    return best if best is not None else Realization("undetermined", math.inf)


def _labels_of(name: str) -> tuple[str, ...]:
    out = []
    i = 0
    while i < len(name):
        if name[i] in "sml":
            out.append(name[i : i + 2])
            i += 2
        else:
            out.append(name[i])
            i += 1
    return tuple(out)
