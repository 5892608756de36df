"""Model tile shapes: angle-type alphabets, cyclic labelings and the
interval algebra used to prune angle sums at tiling-vertices.

All angles are exact rationals in units of pi.  An angle-type confines an
angle to an interval: acute (0, 1/2), right {1/2}, obtuse (1/2, 1), plain
{1}.  Triangle runs in equiangular mode refine acute and obtuse at the
quarter points: sa/ma/la are acute angles below, at and above 1/4, and
so/mo/lo are obtuse angles below, at and above 3/4.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence

HALF = Fraction(1, 2)
ONE = Fraction(1)

ACUTE = "a"
RIGHT = "r"
OBTUSE = "o"
PLAIN = "p"
SMALL_ACUTE = "sa"
MID_ACUTE = "ma"
LARGE_ACUTE = "la"
SMALL_OBTUSE = "so"
MID_OBTUSE = "mo"
LARGE_OBTUSE = "lo"

COARSE_ALPHABET = (ACUTE, RIGHT, OBTUSE)
REFINED_ALPHABET = (SMALL_ACUTE, MID_ACUTE, LARGE_ACUTE, RIGHT, SMALL_OBTUSE, MID_OBTUSE, LARGE_OBTUSE)

# canonical ordering of types, by increasing angle
TYPE_ORDER = {
    SMALL_ACUTE: 0,
    MID_ACUTE: 1,
    LARGE_ACUTE: 2,
    ACUTE: 3,
    RIGHT: 4,
    SMALL_OBTUSE: 5,
    MID_OBTUSE: 6,
    LARGE_OBTUSE: 7,
    OBTUSE: 8,
    PLAIN: 9,
}

# exact open/closed angle ranges per type: (lo, lo_strict, hi, hi_strict)
EXACT_RANGE = {
    ACUTE: (Fraction(0), True, HALF, True),
    RIGHT: (HALF, False, HALF, False),
    OBTUSE: (HALF, True, ONE, True),
    PLAIN: (ONE, False, ONE, False),
    SMALL_ACUTE: (Fraction(0), True, Fraction(1, 4), True),
    MID_ACUTE: (Fraction(1, 4), False, Fraction(1, 4), False),
    LARGE_ACUTE: (Fraction(1, 4), True, HALF, True),
    SMALL_OBTUSE: (HALF, True, Fraction(3, 4), True),
    MID_OBTUSE: (Fraction(3, 4), False, Fraction(3, 4), False),
    LARGE_OBTUSE: (Fraction(3, 4), True, ONE, True),
}

DEFAULT_EPS = Fraction(1, 20)


def check_eps(eps: Fraction) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 18):
        raise ValueError(f"eps must lie in (0, 1/18), got {eps}")
    return eps


def mina(t: str, eps: Fraction = DEFAULT_EPS) -> Fraction:
    """Smallest angle value (units of pi) an angle of type t can take,
    with margin eps on strict bounds."""
    eps = check_eps(eps)
    lo, strict, _, _ = EXACT_RANGE[t]
    return lo + eps if strict else lo


def maxa(t: str, eps: Fraction = DEFAULT_EPS) -> Fraction:
    """Largest angle value an angle of type t can take, eps-margined."""
    eps = check_eps(eps)
    _, _, hi, strict = EXACT_RANGE[t]
    return hi - eps if strict else hi


def angle_interval(t: str, eps: Fraction = DEFAULT_EPS) -> "AngleInterval":
    return AngleInterval(mina(t, eps), maxa(t, eps))


@dataclass(frozen=True)
class AngleInterval:
    """Closed interval of angle values in units of pi."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not 0 < self.lo <= self.hi <= 1:
            raise ValueError(f"bad angle interval [{self.lo}, {self.hi}]")


def vertex_sum_feasible(
    incident: Sequence[str], target: Fraction, eps: Fraction = DEFAULT_EPS, extra_slots: int = 0
) -> bool:
    """Can angles of the given types sum to the face target?

    ``extra_slots`` counts incident tiles whose type is still unknown;
    each contributes anything from a minimal acute to a plain angle.
    """
    lo = sum(mina(t, eps) for t in incident) + extra_slots * mina(ACUTE, eps)
    hi = sum(maxa(t, eps) for t in incident) + extra_slots * maxa(PLAIN, eps)
    return lo <= target <= hi


# ---------------------------------------------------------------------------
# tile labelings


@dataclass(frozen=True)
class TileShape:
    """A model tile: side count k and cyclic angle-type labels.

    Vertex j (0-based) has angle variable alpha_j; side j joins vertices
    j and j+1 and has length variable t_j.
    """

    k: int
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.k != len(self.labels):
            raise ValueError("label count must equal side count")

    @property
    def name(self) -> str:
        return "".join(self.labels)

    def count(self, t: str) -> int:
        return sum(1 for x in self.labels if x == t)


def canonical_label_string(labels: Sequence[str]) -> tuple[str, ...]:
    """Least rotation/reflection of a cyclic label word, ordering types
    by increasing angle."""
    seq = tuple(labels)
    k = len(seq)
    best = None
    for word in (seq, tuple(reversed(seq))):
        for r in range(k):
            cand = word[r:] + word[:r]
            key = tuple(TYPE_ORDER[t] for t in cand)
            if best is None or key < best[0]:
                best = (key, cand)
    return best[1]


def _sum_feasible_labels(labels: Sequence[str], eps: Fraction) -> bool:
    k = len(labels)
    target = Fraction(k - 2)
    lo = sum(mina(t, eps) for t in labels)
    hi = sum(maxa(t, eps) for t in labels)
    return lo <= target <= hi


def enumerate_labelings(k: int, mode: str, eps: Fraction = DEFAULT_EPS) -> list[TileShape]:
    """All cyclic angle-type labelings of a convex k-gon for a run mode.

    Modes: ``square`` (congruent tiles of a square: no two consecutive
    right angles, not all right), ``rectangle`` (congruent tiles of a
    rectangle: only the all-right labeling excluded), ``equiangular``
    (all-right excluded; triangles use the refined alphabet).

    Each rotation/reflection class appears exactly once, in canonical
    form, sorted by increasing angle word.
    """
    if not 3 <= k <= 6:
        raise ValueError("supported side counts are 3..6")
    if mode not in ("square", "rectangle", "equiangular"):
        raise ValueError(f"unknown mode {mode!r}")
    alphabet = REFINED_ALPHABET if (mode == "equiangular" and k == 3) else COARSE_ALPHABET
    seen: set[tuple[str, ...]] = set()
    out: list[TileShape] = []
    for word in product(alphabet, repeat=k):
        canon = canonical_label_string(word)
        if canon in seen or canon != word:
            continue
        seen.add(canon)
        if all(t == RIGHT for t in word):
            continue  # the tile is not a rectangle
        if mode == "square" and k == 4 and _has_consecutive_rights(word):
            continue
        if not _sum_feasible_labels(word, eps):
            continue
        out.append(TileShape(k, word))
    out.sort(key=lambda s: tuple(TYPE_ORDER[t] for t in s.labels))
    return out


def _has_consecutive_rights(labels: Sequence[str]) -> bool:
    k = len(labels)
    return any(labels[i] == RIGHT and labels[(i + 1) % k] == RIGHT for i in range(k))


def expand_label_class(labels: Sequence[str]) -> set[tuple[str, ...]]:
    """Every rotation and reflection of a cyclic word (test helper for
    coverage checks)."""
    seq = tuple(labels)
    k = len(seq)
    out = set()
    for word in (seq, tuple(reversed(seq))):
        for r in range(k):
            out.add(word[r:] + word[:r])
    return out
