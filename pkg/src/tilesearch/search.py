"""Depth-first assignment search over a candidate pair.

Every tile meets each of its incident tiling-vertices in exactly one
angle slot; the search assigns each slot a model-tile vertex or the
plain mark.  Slots are explored in a fixed frontier order (corner
vertices, then side vertices in boundary order, then interior), options
are pruned by cyclic-order compatibility, plain budgets, angle-sum
interval checks and slot caps, and every surviving extension must keep
the exact equation system consistent and inside its bounds.

A candidate is refuted when the tree is exhausted with every leaf
discarded for a named reason; complete assignments that clear the exact
checks (and, for congruent quadrilaterals, the numeric guard) are
reported as survivors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .equations import (
    Topology,
    VarMap,
    angle_vertex_equation,
    aror_branch_values,
    arro_exact_rows,
    base_system,
    build_topology,
    make_varmap,
    nonlinear_guard,
    side_run_equations,
    similar_tile_guard,
)
from .filters import SearchConstraints
from .linsys import FeasibilityOverflow, LinearSystem
from .planegraph import CandidatePair, CORNER, INVALID
from .shapes import PLAIN, TileShape, vertex_sum_feasible

F = Fraction

REFUTED = "refuted"
SURVIVED = "survived"
INCONCLUSIVE = "inconclusive"

# discard reasons
R_CYCLIC = "cyclic-order"
R_PLAIN = "plain-budget"
R_SUM = "angle-sum"
R_CAP = "slot-cap"
R_LINEAR = "linear-inconsistent"
R_BOUNDS = "bounds-infeasible"
R_GUARD = "nonlinear-guard"


@dataclass(frozen=True)
class SearchConfig:
    eps: Fraction = F(1, 20)
    tau: float = 1e-9
    node_cap: int = 10**8
    guard_dim: int = 2
    feas_dim: int = 4
    allow_reflection: bool = True
    transcript: bool = False


@dataclass
class Certificate:
    candidate: str
    shape: str
    mode: str
    n_tiles: int
    outcome: str
    nodes: int
    reasons: dict[str, int]
    survivors: list[dict]
    note: str = ""
    transcript: list = field(default_factory=list)

    def as_record(self) -> dict:
        rec = {
            "candidate": self.candidate,
            "shape": self.shape,
            "mode": self.mode,
            "n": self.n_tiles,
            "outcome": self.outcome,
            "nodes": self.nodes,
            "reasons": dict(sorted(self.reasons.items())),
            "survivors": self.survivors,
            "note": self.note,
        }
        if self.transcript:
            rec["transcript"] = self.transcript
        return rec


class NodeCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Slot:
    tile: int
    pos: int
    face: int


def frontier_order(topo: Topology) -> tuple[Slot, ...]:
    """Deterministic slot order: corner faces by corner index, side faces
    along each frame side in rotation order, then interior faces."""
    g = topo.cand.graph
    sides = topo.cand.sides
    by_kind = {f.index: f for f in topo.faces}
    order: list[int] = []
    corner_faces = {f.corner: f.index for f in topo.faces if f.kind == "corner"}
    order.extend(corner_faces[k] for k in sorted(corner_faces))
    face_of = g.face_of_directed_edge
    seen = set(order)
    for k in range(4):
        s = sides[k]
        for u in g.rotation[s]:
            fidx = face_of[(u, s)]
            f = by_kind[fidx]
            if f.kind == "side" and f.side == k and fidx not in seen:
                seen.add(fidx)
                order.append(fidx)
    for f in topo.faces:
        if f.kind == "interior":
            order.append(f.index)
    slots: list[Slot] = []
    for fidx in order:
        for tile, pos in topo.face_slots[fidx]:
            slots.append(Slot(tile, pos, fidx))
    return tuple(slots)


class SearchProblem:
    """One (candidate, shape) search instance."""

    def __init__(
        self,
        cand: CandidatePair,
        shape: TileShape,
        mode: str,
        config: SearchConfig = SearchConfig(),
        constraints: SearchConstraints = SearchConstraints(),
        topo: Optional[Topology] = None,
    ):
        if mode not in ("square", "rectangle", "equiangular"):
            raise ValueError(f"unknown mode {mode!r}")
        self.cand = cand
        self.shape = shape
        self.mode = mode
        self.config = config
        self.topo = topo if topo is not None else build_topology(cand)
        if any(f.kind == INVALID for f in self.topo.faces):
            raise ValueError("candidate has invalid faces; run filters first")
        self.varmap = make_varmap(self.topo, shape, mode)
        self.constraints = constraints
        self.slots = frontier_order(self.topo)
        self.targets = self.topo.targets
        self.caps: dict[tuple[int, int], list] = {}
        for cap in constraints.slot_caps:
            self.caps.setdefault((cap.tile, cap.face), []).append(cap)
        self.k = shape.k
        self.labels = shape.labels
        self._acute_corner_branch = (
            aror_branch_values(shape) if self.varmap.with_lengths else None
        )
        self._is_arro = self.varmap.with_lengths and shape.labels == ("a", "r", "r", "o")
        # mutable search state
        self.values: dict[tuple[int, int], object] = {}
        self.tile_anchor: dict[int, dict[int, int]] = {t: {} for t in cand.tiles}
        self.tile_plains: dict[int, int] = {t: 0 for t in cand.tiles}
        self.tile_used: dict[int, set] = {t: set() for t in cand.tiles}
        self.tile_assigned: dict[int, int] = {t: 0 for t in cand.tiles}
        self.face_types: dict[int, list[str]] = {f: [] for f in self.targets}
        self.face_remaining: dict[int, int] = {
            f: len(self.topo.face_slots[f]) for f in self.targets
        }
        self.nodes = 0
        self.reasons: dict[str, int] = {}
        self.survivors: list[dict] = []
        self.transcript: list = []

    # -- state updates ------------------------------------------------------

    def _apply(self, slot: Slot, value) -> None:
        self.values[(slot.tile, slot.pos)] = value
        self.tile_assigned[slot.tile] += 1
        self.face_remaining[slot.face] -= 1
        if value == PLAIN:
            self.tile_plains[slot.tile] += 1
            self.face_types[slot.face].append(PLAIN)
        else:
            self.tile_anchor[slot.tile][slot.pos] = value
            self.tile_used[slot.tile].add(value)
            self.face_types[slot.face].append(self.labels[value])

    def _undo(self, slot: Slot, value) -> None:
        del self.values[(slot.tile, slot.pos)]
        self.tile_assigned[slot.tile] -= 1
        self.face_remaining[slot.face] += 1
        self.face_types[slot.face].pop()
        if value == PLAIN:
            self.tile_plains[slot.tile] -= 1
        else:
            del self.tile_anchor[slot.tile][slot.pos]
            self.tile_used[slot.tile].discard(value)

    # -- option generation ----------------------------------------------------

    def _face_sum_ok(self, face: int, new_type: str) -> bool:
        types = self.face_types[face] + [new_type]
        return vertex_sum_feasible(
            types, self.targets[face], self.config.eps, self.face_remaining[face] - 1
        )

    def _cap_ok(self, slot: Slot, label: str) -> bool:
        from .shapes import EXACT_RANGE

        for cap in self.caps.get((slot.tile, slot.face), ()):
            lo, lo_strict, _, _ = EXACT_RANGE[label]
            if lo > cap.limit or (lo == cap.limit and (cap.strict or lo_strict)):
                return False
        return True

    def _cyclic_ok(self, tile: int, pos: int, idx: int) -> bool:
        anchors = sorted(self.tile_anchor[tile].items())
        merged = sorted(anchors + [(pos, idx)])
        a = len(merged)
        if a <= 1:
            return True
        d = len(self.topo.tile_nbrs[tile])
        orientations = (1, -1) if self.config.allow_reflection else (1,)
        for sigma in orientations:
            total = 0
            ok = True
            for i in range(a):
                p1, x1 = merged[i]
                p2, x2 = merged[(i + 1) % a]
                g = (sigma * (x2 - x1)) % self.k
                if g == 0:
                    ok = False
                    break
                between = (p2 - p1 - 1) % d
                unassigned = between - self._assigned_between(tile, p1, p2)
                if unassigned < g - 1:
                    ok = False
                    break
                total += g
            if ok and total == self.k:
                return True
        return False

    def _assigned_between(self, tile: int, p1: int, p2: int) -> int:
        d = len(self.topo.tile_nbrs[tile])
        count = 0
        p = (p1 + 1) % d
        while p != p2:
            if (tile, p) in self.values:
                count += 1
            p = (p + 1) % d
        return count

    def candidate_assignments(self, slot: Slot) -> tuple[list, list]:
        """Valid extensions for a slot plus the rejected options with
        their discard reasons (the two lists cover all k+1 options)."""
        options: list = []
        rejects: list[tuple[object, str]] = []
        t = slot.tile
        d = len(self.topo.tile_nbrs[t])
        for j in range(self.k):
            label = self.labels[j]
            if j in self.tile_used[t]:
                rejects.append((j, R_CYCLIC))
            elif not self._cap_ok(slot, label):
                rejects.append((j, R_CAP))
            elif not self._face_sum_ok(slot.face, label):
                rejects.append((j, R_SUM))
            elif not self._cyclic_ok(t, slot.pos, j):
                rejects.append((j, R_CYCLIC))
            else:
                options.append(j)
        if self.tile_plains[t] >= d - self.k:
            rejects.append((PLAIN, R_PLAIN))
        elif not self._cap_ok(slot, PLAIN):
            rejects.append((PLAIN, R_CAP))
        elif not self._face_sum_ok(slot.face, PLAIN):
            rejects.append((PLAIN, R_SUM))
        else:
            options.append(PLAIN)
        return options, rejects

    # -- verification -----------------------------------------------------------

    def _completion_rows(self, slot: Slot, value):
        rows = []
        if self.face_remaining[slot.face] == 0:
            entries = [
                (t, self.values[(t, p)]) for t, p in self.topo.face_slots[slot.face]
            ]
            rows.append(
                angle_vertex_equation(self.targets[slot.face], entries, self.varmap)
            )
        if (
            self.varmap.with_lengths
            and self.tile_assigned[slot.tile] == len(self.topo.tile_nbrs[slot.tile])
        ):
            slot_values = [
                self.values[(slot.tile, p)]
                for p in range(len(self.topo.tile_nbrs[slot.tile]))
            ]
            rows.extend(
                side_run_equations(self.topo, self.varmap, slot.tile, slot_values, self.k)
            )
        return rows

    def verify(self, slot: Slot, value, sys_: LinearSystem):
        """Apply completion equations and triggered branch rows.

        Returns (list of live branch systems, discard reason).  The list
        is empty exactly when a reason is given.
        """
        rows = self._completion_rows(slot, value)
        if rows:
            sys_ = sys_.clone()
            for coeffs, const in rows:
                if not sys_.add_equation(coeffs, const):
                    return [], R_LINEAR
            if self._is_arro:
                a1 = sys_.pinned(self.varmap.angle(0))
                if a1 is not None:
                    for coeffs, const in arro_exact_rows(self.shape, self.varmap, a1):
                        if not sys_.add_equation(coeffs, const):
                            return [], R_LINEAR
            if sys_.propagation_infeasible():
                return [], R_BOUNDS
            if sys_.dimension() <= self.config.feas_dim:
                try:
                    if not sys_.feasible_with_bounds():
                        return [], R_BOUNDS
                except FeasibilityOverflow:
                    pass
            if self.varmap.with_lengths and self.shape.k == 4:
                if not nonlinear_guard(
                    sys_,
                    self.shape,
                    self.varmap,
                    self.cand.n_tiles,
                    self.mode == "square",
                    self.config.tau,
                    self.config.guard_dim,
                ):
                    return [], R_GUARD
        branches = [sys_]
        if (
            self._acute_corner_branch
            and value != PLAIN
            and self.labels[value] == "a"
            and self.topo.faces[slot.face].kind == CORNER
            and sys_.pinned(self.varmap.angle(value)) is None
        ):
            branches = []
            dead = R_LINEAR
            for pinval in self._acute_corner_branch:
                b = sys_.clone()
                if not b.add_equation({self.varmap.angle(value): F(1)}, pinval):
                    continue
                if b.propagation_infeasible():
                    dead = R_BOUNDS
                    continue
                branches.append(b)
            if not branches:
                return [], dead
        return branches, None

    # -- main DFS ---------------------------------------------------------------

    def _tally(self, reason: str, count: int = 1) -> None:
        self.reasons[reason] = self.reasons.get(reason, 0) + count

    def _note_step(self, depth: int, slot: Slot, value, result: str) -> None:
        if self.config.transcript:
            self.transcript.append([depth, slot.tile, slot.face, str(value), result])

    def _complete(self, sys_: LinearSystem) -> None:
        if not sys_.feasible_with_bounds():
            self._tally(R_BOUNDS)
            return
        if self.varmap.with_lengths and self.shape.k == 4:
            if not nonlinear_guard(
                sys_,
                self.shape,
                self.varmap,
                self.cand.n_tiles,
                self.mode == "square",
                self.config.tau,
                self.config.guard_dim,
            ):
                self._tally(R_GUARD)
                return
        if self.mode == "equiangular" and self.shape.k == 3:
            if not similar_tile_guard(self.topo, sys_, self.shape, self.varmap, self.values):
                self._tally(R_GUARD)
                return
        self.survivors.append(self._survivor_record(sys_))

    def _survivor_record(self, sys_: LinearSystem) -> dict:
        assignment = sorted(
            [t, self.slots_face(t, p), p, str(v)] for (t, p), v in self.values.items()
        )
        angles = {}
        for j in range(self.k):
            val = sys_.pinned(self.varmap.angle(j))
            angles[f"alpha_{j}"] = str(val) if val is not None else None
        return {
            "assignment": assignment,
            "angles": angles,
            "free_dimension": sys_.dimension(),
        }

    def slots_face(self, tile: int, pos: int) -> int:
        return self.topo.tile_faces[tile][pos]

    def _dfs(self, idx: int, sys_: LinearSystem) -> None:
        if idx == len(self.slots):
            self._complete(sys_)
            return
        slot = self.slots[idx]
        options, rejects = self.candidate_assignments(slot)
        for value, reason in rejects:
            self._tally(reason)
            self._note_step(idx, slot, value, reason)
        for value in options:
            self.nodes += 1
            if self.nodes > self.config.node_cap:
                raise NodeCapExceeded()
            self._apply(slot, value)
            try:
                branches, reason = self.verify(slot, value, sys_)
                if reason is not None:
                    self._tally(reason)
                    self._note_step(idx, slot, value, reason)
                else:
                    self._note_step(idx, slot, value, "extend")
                for branch in branches:
                    self._dfs(idx + 1, branch)
            finally:
                self._undo(slot, value)

    def run(self) -> Certificate:
        sys_ = base_system(
            self.topo, self.shape, self.varmap, self.mode, self.constraints.angle_floor
        )
        note = ""
        outcome = REFUTED
        try:
            ok = sys_.consistent
            for face, target in self.targets.items():
                if not self.topo.face_slots[face]:
                    entries: list = []
                    coeffs, const = angle_vertex_equation(target, entries, self.varmap)
                    ok = sys_.add_equation(coeffs, const) and ok
            if not ok:
                self._tally(R_LINEAR)
            elif sys_.propagation_infeasible():
                self._tally(R_BOUNDS)
            else:
                self._dfs(0, sys_)
        except NodeCapExceeded:
            outcome = INCONCLUSIVE
            note = f"node cap {self.config.node_cap} exceeded"
        except FeasibilityOverflow as exc:
            outcome = INCONCLUSIVE
            note = f"feasibility overflow: {exc}"
        if outcome != INCONCLUSIVE:
            outcome = SURVIVED if self.survivors else REFUTED
        return Certificate(
            candidate=self.cand.id_hex(),
            shape=self.shape.name,
            mode=self.mode,
            n_tiles=self.cand.n_tiles,
            outcome=outcome,
            nodes=self.nodes,
            reasons=self.reasons,
            survivors=self.survivors,
            note=note,
            transcript=self.transcript,
        )


def run_search(
    cand: CandidatePair,
    shape: TileShape,
    mode: str,
    config: SearchConfig = SearchConfig(),
    constraints: SearchConstraints = SearchConstraints(),
    topo: Optional[Topology] = None,
) -> Certificate:
    return SearchProblem(cand, shape, mode, config, constraints, topo).run()
