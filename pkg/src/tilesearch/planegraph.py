"""Embedded planar graphs: parsing, validation, canonical codes, candidates.

A plane graph is stored as a rotation system: for every vertex, the cyclic
sequence of its neighbours in the embedding.  All vertex ids are 0-based
internally; the planar_code file format is 1-based.

The graphs handled here model tilings of a square or rectangle: four
"side" vertices form a distinguished 4-cycle S, every other vertex is a
tile, and every face other than the one bounded by S corresponds to a
tiling-vertex (a corner point of some tile).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

PLANAR_CODE_HEADER = b">>planar_code<<"

APEX = "apex"
CORNER = "corner"
SIDE = "side"
INTERIOR = "interior"
INVALID = "invalid"


class GraphParseError(ValueError):
    """Raised for malformed graph input; carries the offending byte offset."""

    def __init__(self, message: str, offset: Optional[int] = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class GraphInvariantError(ValueError):
    """Raised when a rotation system violates a PlaneGraph invariant."""


@dataclass(frozen=True)
class PlaneGraph:
    """Immutable plane graph given by its rotation system."""

    rotation: tuple[tuple[int, ...], ...]

    @property
    def vertex_count(self) -> int:
        return len(self.rotation)

    @cached_property
    def edge_count(self) -> int:
        return sum(len(r) for r in self.rotation) // 2

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(r) for r in self.rotation)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for u, rot in enumerate(self.rotation):
            for v in rot:
                if u < v:
                    out.append((u, v))
        return tuple(out)

    @cached_property
    def faces(self) -> tuple[tuple[int, ...], ...]:
        """Faces as vertex cycles from next-edge-in-rotation traversal.

        The successor rule is used: the directed edge after (u, v) is
        (v, w) where w follows u in the rotation of v.  Every directed
        edge lies on exactly one face.
        """
        pos = self._positions
        seen: set[tuple[int, int]] = set()
        out: list[tuple[int, ...]] = []
        for u0, rot in enumerate(self.rotation):
            for v0 in rot:
                if (u0, v0) in seen:
                    continue
                cycle = []
                u, v = u0, v0
                while (u, v) not in seen:
                    seen.add((u, v))
                    cycle.append(u)
                    ru = self.rotation[v]
                    u, v = v, ru[(pos[v][u] + 1) % len(ru)]
                out.append(tuple(cycle))
        return tuple(out)

    @cached_property
    def _positions(self) -> tuple[dict[int, int], ...]:
        return tuple({w: i for i, w in enumerate(rot)} for rot in self.rotation)

    @cached_property
    def face_of_directed_edge(self) -> dict[tuple[int, int], int]:
        lookup: dict[tuple[int, int], int] = {}
        for idx, cycle in enumerate(self.faces):
            m = len(cycle)
            for i in range(m):
                lookup[(cycle[i], cycle[(i + 1) % m])] = idx
        return lookup

    def validate(self) -> None:
        """Check simplicity, adjacency symmetry and the Euler relation."""
        n = self.vertex_count
        for u, rot in enumerate(self.rotation):
            if u in rot:
                raise GraphInvariantError(f"loop at vertex {u}")
            if len(set(rot)) != len(rot):
                raise GraphInvariantError(f"repeated neighbour at vertex {u}")
            for v in rot:
                if not 0 <= v < n:
                    raise GraphInvariantError(f"neighbour {v} out of range at {u}")
                if u not in self.adjacency[v]:
                    raise GraphInvariantError(f"asymmetric adjacency {u}->{v}")
        euler = n - self.edge_count + len(self.faces)
        if euler != 2:
            raise GraphInvariantError(f"Euler relation violated: V-E+F = {euler}")


def plane_graph(rotation: Iterable[Iterable[int]], check: bool = True) -> PlaneGraph:
    g = PlaneGraph(tuple(tuple(r) for r in rotation))
    if check:
        g.validate()
    return g


# ---------------------------------------------------------------------------
# planar_code and the companion text format


def parse_planar_code(data: bytes) -> list[PlaneGraph]:
    """Parse a planar_code byte stream into plane graphs.

    Format: optional 15-byte ASCII header, then per graph one byte N
    followed by N zero-terminated neighbour lists in rotation order,
    all ids 1-based.  Graphs with N > 255 are not supported.
    """
    pos = 0
    if data[: len(PLANAR_CODE_HEADER)] == PLANAR_CODE_HEADER:
        pos = len(PLANAR_CODE_HEADER)
    graphs: list[PlaneGraph] = []
    size = len(data)
    while pos < size:
        n = data[pos]
        start = pos
        pos += 1
        if n == 0:
            raise GraphParseError("vertex count of zero", start)
        rotation: list[tuple[int, ...]] = []
        for v in range(n):
            nbrs = []
            while True:
                if pos >= size:
                    raise GraphParseError(
                        f"truncated stream inside neighbour list of vertex {v + 1}", pos
                    )
                b = data[pos]
                pos += 1
                if b == 0:
                    break
                if b > n:
                    raise GraphParseError(
                        f"vertex id {b} out of range [1,{n}]", pos - 1
                    )
                nbrs.append(b - 1)
            rotation.append(tuple(nbrs))
        g = PlaneGraph(tuple(rotation))
        try:
            g.validate()
        except GraphInvariantError as exc:
            raise GraphParseError(f"invalid graph: {exc}", start) from exc
        graphs.append(g)
    return graphs


def write_planar_code(graphs: Sequence[PlaneGraph], header: bool = True) -> bytes:
    out = bytearray()
    if header:
        out += PLANAR_CODE_HEADER
    for g in graphs:
        if g.vertex_count > 255:
            raise ValueError("planar_code supports at most 255 vertices")
        out.append(g.vertex_count)
        for rot in g.rotation:
            out.extend(v + 1 for v in rot)
            out.append(0)
    return bytes(out)


def parse_text_graphs(text: str) -> list[PlaneGraph]:
    """Parse the hand-fixture text format: one graph per line,
    ``N; nbrs of 1; nbrs of 2; ...`` with 1-based ids."""
    graphs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(";")]
        try:
            n = int(fields[0])
        except ValueError as exc:
            raise GraphParseError(f"line {lineno}: bad vertex count") from exc
        if len(fields) != n + 1:
            raise GraphParseError(
                f"line {lineno}: expected {n} rotation lists, got {len(fields) - 1}"
            )
        rotation = tuple(
            tuple(int(tok) - 1 for tok in field.split()) for field in fields[1:]
        )
        g = PlaneGraph(rotation)
        try:
            g.validate()
        except GraphInvariantError as exc:
            raise GraphParseError(f"line {lineno}: invalid graph: {exc}") from exc
        graphs.append(g)
    return graphs


# ---------------------------------------------------------------------------
# connectivity


def check_three_connected(g: PlaneGraph) -> bool:
    """True iff no single vertex or vertex pair disconnects g (V >= 4)."""
    n = g.vertex_count
    if n < 4:
        return False
    adj = [0] * n
    for u, rot in enumerate(g.rotation):
        m = 0
        for v in rot:
            m |= 1 << v
        adj[u] = m
    full = (1 << n) - 1
    if not _connected_mask(adj, full):
        return False
    for a in range(n):
        abit = 1 << a
        for b in range(a + 1, n):
            rest = full & ~abit & ~(1 << b)
            if not _connected_mask(adj, rest):
                return False
    return True


def _connected_mask(adj: list[int], mask: int) -> bool:
    if mask == 0:
        return True
    start = mask & -mask
    reach = start
    frontier = start
    while frontier:
        nxt = 0
        m = frontier
        while m:
            vbit = m & -m
            nxt |= adj[vbit.bit_length() - 1]
            m ^= vbit
        frontier = nxt & mask & ~reach
        reach |= frontier
    return reach == mask


# ---------------------------------------------------------------------------
# canonical codes


def _vertex_signatures(g: PlaneGraph) -> list[tuple]:
    degs = [len(r) for r in g.rotation]
    return [(degs[u], tuple(sorted(degs[v] for v in g.rotation[u]))) for u in range(g.vertex_count)]


def _bfs_code(rotation: tuple[tuple[int, ...], ...], start_u: int, start_v: int, reflect: bool) -> bytes:
    label = {start_u: 0}
    order = [start_u]
    anchor = {start_u: start_v}
    out = bytearray()
    qi = 0
    while qi < len(order):
        u = order[qi]
        qi += 1
        rot = rotation[u]
        d = len(rot)
        a = rot.index(anchor[u])
        step = -1 if reflect else 1
        for i in range(d):
            w = rot[(a + step * i) % d]
            lw = label.get(w)
            if lw is None:
                lw = len(order)
                label[w] = lw
                order.append(w)
                anchor[w] = u
            out.append(lw + 1)
        out.append(0)
    return bytes(out)


def canonical_code(g: PlaneGraph, root: Optional[int] = None) -> bytes:
    """Canonical byte code of a plane graph, invariant under relabelling
    and reflection.

    When ``root`` is given the code is minimal only over traversals that
    start at the root, so equality means isomorphic by a root-fixing map.
    Computed as the lexicographic minimum of BFS codes over candidate
    starting directed edges and both orientations.
    """
    rotation = g.rotation
    if root is not None:
        starts = [(root, w) for w in rotation[root]]
    else:
        sigs = _vertex_signatures(g)
        best_sig = min(sigs)
        starts = [
            (u, w)
            for u in range(g.vertex_count)
            if sigs[u] == best_sig
            for w in rotation[u]
        ]
    best: Optional[bytes] = None
    for u, w in starts:
        for reflect in (False, True):
            code = _bfs_code(rotation, u, w, reflect)
            if best is None or code < best:
                best = code
    assert best is not None
    return best


def rotation_from_code(code: bytes) -> tuple[tuple[int, ...], ...]:
    """Decode a canonical code back into a rotation system (0-based)."""
    rotation: list[tuple[int, ...]] = []
    current: list[int] = []
    for b in code:
        if b == 0:
            rotation.append(tuple(current))
            current = []
        else:
            current.append(b - 1)
    if current:
        raise GraphParseError("canonical code not zero-terminated")
    return tuple(rotation)


def relabel(g: PlaneGraph, perm: Sequence[int]) -> PlaneGraph:
    """Apply a vertex relabelling: vertex v becomes perm[v]."""
    n = g.vertex_count
    new_rot: list[tuple[int, ...]] = [()] * n
    for u, rot in enumerate(g.rotation):
        new_rot[perm[u]] = tuple(perm[v] for v in rot)
    return PlaneGraph(tuple(new_rot))


def mirror(g: PlaneGraph) -> PlaneGraph:
    """The reflected embedding: every rotation list reversed."""
    return PlaneGraph(tuple(tuple(reversed(rot)) for rot in g.rotation))


# ---------------------------------------------------------------------------
# candidate pairs


@dataclass(frozen=True)
class CandidatePair:
    """A tiling candidate: plane graph G with its distinguished 4-cycle S.

    ``graph`` is canonically relabelled (the apex traversal order), so
    equal candidates are byte-identical.  ``code`` is the rooted
    canonical code of the apexed graph and serves as the candidate id.
    """

    graph: PlaneGraph
    sides: tuple[int, int, int, int]
    code: bytes

    @property
    def tiles(self) -> tuple[int, ...]:
        s = set(self.sides)
        return tuple(v for v in range(self.graph.vertex_count) if v not in s)

    @property
    def n_tiles(self) -> int:
        return self.graph.vertex_count - 4

    def id_hex(self) -> str:
        return self.code.hex()


def eligible_apexes(g: PlaneGraph) -> list[int]:
    """Vertices that can play the added apex role: degree 4, all four
    incident faces triangles, neighbourhood inducing exactly a 4-cycle."""
    out = []
    face_of = g.face_of_directed_edge
    faces = g.faces
    for v in range(g.vertex_count):
        rot = g.rotation[v]
        if len(rot) != 4:
            continue
        if any(len(faces[face_of[(w, v)]]) != 3 for w in rot):
            continue
        a, b, c, d = rot
        if g.has_edge(a, c) or g.has_edge(b, d):
            continue
        out.append(v)
    return out


def remove_vertex(g: PlaneGraph, v: int) -> PlaneGraph:
    rot = []
    for u in range(g.vertex_count):
        if u == v:
            continue
        rot.append(tuple(w if w < v else w - 1 for w in g.rotation[u] if w != v))
    return PlaneGraph(tuple(rot))


def extract_candidates(g: PlaneGraph) -> list[CandidatePair]:
    """All candidate pairs obtainable from an apexed graph, one per
    eligible apex vertex, deduplicated by rooted canonical code."""
    seen: set[bytes] = set()
    out: list[CandidatePair] = []
    for v in eligible_apexes(g):
        code = canonical_code(g, root=v)
        if code in seen:
            continue
        seen.add(code)
        apexed = PlaneGraph(rotation_from_code(code))
        sides = tuple(w - 1 for w in apexed.rotation[0])
        graph = remove_vertex(apexed, 0)
        out.append(CandidatePair(graph=graph, sides=sides, code=code))
    return out


# ---------------------------------------------------------------------------
# face classification for candidates


@dataclass(frozen=True)
class FaceInfo:
    """One face of a candidate graph, classified by its side-vertices.

    ``corner`` is k when the face holds consecutive side-vertices
    S_k, S_{k+1} (indices into the S-cycle, mod 4); ``side`` is k when
    the face holds exactly S_k.  ``tiles`` lists tile vertices in
    boundary order.
    """

    index: int
    boundary: tuple[int, ...]
    kind: str
    corner: Optional[int]
    side: Optional[int]
    tiles: tuple[int, ...]


def classify_faces(cand: CandidatePair) -> tuple[FaceInfo, ...]:
    g = cand.graph
    sides = cand.sides
    side_pos = {s: k for k, s in enumerate(sides)}
    apex_idx = _apex_face_index(g, sides)
    infos = []
    for idx, boundary in enumerate(g.faces):
        on = sorted(side_pos[v] for v in boundary if v in side_pos)
        tiles = tuple(v for v in boundary if v not in side_pos)
        if idx == apex_idx:
            infos.append(FaceInfo(idx, boundary, APEX, None, None, tiles))
        elif len(on) == 0:
            infos.append(FaceInfo(idx, boundary, INTERIOR, None, None, tiles))
        elif len(on) == 1:
            infos.append(FaceInfo(idx, boundary, SIDE, None, on[0], tiles))
        elif len(on) == 2 and (on[1] - on[0]) % 4 in (1, 3):
            k = on[0] if (on[1] - on[0]) % 4 == 1 else on[1]
            infos.append(FaceInfo(idx, boundary, CORNER, k, None, tiles))
        else:
            infos.append(FaceInfo(idx, boundary, INVALID, None, None, tiles))
    return tuple(infos)


def _apex_face_index(g: PlaneGraph, sides: tuple[int, int, int, int]) -> int:
    side_set = set(sides)
    for idx, boundary in enumerate(g.faces):
        if len(boundary) == 4 and set(boundary) == side_set:
            return idx
    raise GraphInvariantError("no face bounded by the side 4-cycle")


def iter_planar_code_file(path) -> Iterator[PlaneGraph]:
    with open(path, "rb") as fh:
        data = fh.read()
    yield from parse_planar_code(data)
