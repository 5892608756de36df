"""Combinatorial pre-search filters on candidate pairs.

Congruent-mode filters encode facts about tiles of equal diameter; the
equiangular variant only keeps the filters whose proofs survive unequal
tile sizes, plus triangle/quadrilateral observations of its own.  Filters
never modify a candidate: they discard it or attach angle constraints for
the search to consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .planegraph import APEX, CORNER, INVALID, CandidatePair, classify_faces

F = Fraction

KEEP = "keep"
DISCARD = "discard"


@dataclass(frozen=True)
class SlotCap:
    """Upper bound on the angle a tile may place at one tiling-vertex."""

    tile: int
    face: int
    limit: Fraction
    strict: bool


@dataclass(frozen=True)
class SearchConstraints:
    """Angle constraints accumulated by filters, consumed by the search."""

    slot_caps: tuple[SlotCap, ...] = ()
    angle_floor: Optional[Fraction] = None


@dataclass(frozen=True)
class FilterReport:
    candidate: str
    verdict: str
    rule: Optional[str] = None

    def as_record(self) -> dict:
        rec = {"candidate": self.candidate, "verdict": self.verdict}
        if self.rule:
            rec["rule"] = self.rule
        return rec


def _corner_face_of(cand: CandidatePair, k: int) -> Optional[tuple[int, tuple[int, ...]]]:
    """The non-apex face on the S-cycle edge between sides k and k+1."""
    g = cand.graph
    a, b = cand.sides[k], cand.sides[(k + 1) % 4]
    faces = classify_faces(cand)
    apex = next(f.index for f in faces if f.kind == APEX)
    for u, v in ((a, b), (b, a)):
        idx = g.face_of_directed_edge[(u, v)]
        if idx != apex:
            return idx, g.faces[idx]
    return None


def corner_filter(cand: CandidatePair) -> Optional[str]:
    """A tile touching two consecutive frame sides in segments must also
    hold the corner point between them (congruent tiles only)."""
    g = cand.graph
    for k in range(4):
        a, b = cand.sides[k], cand.sides[(k + 1) % 4]
        both = (g.adjacency[a] & g.adjacency[b]) - set(cand.sides)
        if not both:
            continue
        cf = _corner_face_of(cand, k)
        on_corner = set(cf[1]) if cf else set()
        if any(t not in on_corner for t in both):
            return "corner-ownership"
    return None


def opposite_sides_filter(cand: CandidatePair, k: int, mode: str) -> Optional[str]:
    """Square mode, quadrilaterals: a degree-4 tile cannot carry full
    sides on two opposite frame sides."""
    if mode != "square" or k != 4:
        return None
    g = cand.graph
    for m in range(2):
        a, c = cand.sides[m], cand.sides[m + 2]
        for t in (g.adjacency[a] & g.adjacency[c]) - set(cand.sides):
            if g.degree(t) == 4:
                return "opposite-sides"
    return None


def degree_filter(cand: CandidatePair, k: int) -> Optional[str]:
    """Every tile needs at least as many graph neighbours as tile sides."""
    g = cand.graph
    if any(g.degree(t) < k for t in cand.tiles):
        return "tile-degree"
    return None


def face_sanity_filter(cand: CandidatePair) -> Optional[str]:
    """No tiling-vertex lies on two non-consecutive frame sides or on
    three or more of them."""
    if any(f.kind == INVALID for f in classify_faces(cand)):
        return "face-sanity"
    return None


def equiangular_filters(cand: CandidatePair, k: int) -> tuple[Optional[str], SearchConstraints]:
    """Triangle/quadrilateral observations for the equiangular variant.

    Triangles: a tile on two opposite sides is impossible; a tile with a
    segment on side m and a vertex on side m+2 has that angle below a
    right angle; a tile covering a whole side and running onto the next
    side has the far-corner angle at most a quarter turn.  Quadrilaterals
    touching three consecutive sides push every model angle above a
    quarter turn.
    """
    g = cand.graph
    sides = cand.sides
    side_set = set(sides)
    faces = classify_faces(cand)
    caps: list[SlotCap] = []
    if k == 3:
        for t in cand.tiles:
            adj = g.adjacency[t]
            for m in range(2):
                if sides[m] in adj and sides[m + 2] in adj:
                    return "triangle-opposite-sides", SearchConstraints()
        for t in cand.tiles:
            adj = g.adjacency[t]
            for m in range(4):
                if sides[m] not in adj:
                    continue
                far = sides[(m + 2) % 4]
                for f in faces:
                    if f.kind in (APEX, INVALID) or far not in f.boundary:
                        continue
                    if t in f.tiles:
                        caps.append(SlotCap(t, f.index, F(1, 2), True))
        for m in range(4):
            on_side = [t for t in cand.tiles if sides[m] in g.adjacency[t]]
            if len(on_side) != 1:
                continue
            t = on_side[0]
            for delta, corner_k in ((1, (m - 1) % 4), (-1, m)):
                if sides[(m + delta) % 4] in g.adjacency[t]:
                    cf = _corner_face_of(cand, corner_k)
                    if cf and t in cf[1]:
                        caps.append(SlotCap(t, cf[0], F(1, 4), False))
    elif k == 4:
        for t in cand.tiles:
            adj = g.adjacency[t]
            for m in range(4):
                if all(sides[(m + i) % 4] in adj for i in range(3)):
                    return None, SearchConstraints(tuple(caps), angle_floor=F(1, 4))
    return None, SearchConstraints(tuple(caps), None)


CONGRUENT_FILTERS = ("face-sanity", "tile-degree", "corner-ownership", "opposite-sides")


def apply_filters(
    cand: CandidatePair, k: int, mode: str
) -> tuple[FilterReport, SearchConstraints]:
    """Run the mode's filters; one report per candidate, first rule wins."""
    constraints = SearchConstraints()
    rule: Optional[str] = None
    if mode in ("square", "rectangle"):
        rule = (
            face_sanity_filter(cand)
            or degree_filter(cand, k)
            or corner_filter(cand)
            or opposite_sides_filter(cand, k, mode)
        )
    else:
        rule = face_sanity_filter(cand) or degree_filter(cand, k)
        if rule is None:
            rule, constraints = equiangular_filters(cand, k)
    verdict = DISCARD if rule else KEEP
    return FilterReport(cand.id_hex(), verdict, rule), constraints
