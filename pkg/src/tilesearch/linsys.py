"""Incremental exact-rational linear equality systems with per-variable
interval bounds.

The system keeps a reduced echelon form over Fraction coefficients, so
consistency verdicts are exact and never influenced by floating point.
Bound feasibility (does the affine solution set meet the box?) is decided
exactly by Fourier-Motzkin elimination with open/closed tracking; a cheap
interval-propagation pass provides a sound early "infeasible" signal for
search pruning.

Variables are plain integer ids.  Bounds are fixed when a variable is
registered; rows are added incrementally and a system can be cloned
cheaply for backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

ZERO = Fraction(0)


@dataclass(frozen=True)
class Bound:
    """Interval bound; None endpoints mean unbounded."""

    lo: Optional[Fraction] = None
    lo_strict: bool = False
    hi: Optional[Fraction] = None
    hi_strict: bool = False

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None and (x < self.lo or (self.lo_strict and x == self.lo)):
            return False
        if self.hi is not None and (x > self.hi or (self.hi_strict and x == self.hi)):
            return False
        return True


POSITIVE = Bound(lo=ZERO, lo_strict=True)
FREE = Bound()


class FeasibilityOverflow(RuntimeError):
    """Fourier-Motzkin elimination exceeded its working-set cap."""


class LinearSystem:
    """Equality system in reduced echelon form with interval bounds."""

    __slots__ = ("bounds", "rows", "consistent")

    def __init__(self, bounds: Optional[dict[int, Bound]] = None):
        # bounds are shared across clones and never mutated after setup
        self.bounds: dict[int, Bound] = bounds if bounds is not None else {}
        # rows[p] = (coeffs, const) encoding  p = const + sum coeffs[w]*w
        self.rows: dict[int, tuple[dict[int, Fraction], Fraction]] = {}
        self.consistent = True

    def add_variable(self, var: int, bound: Bound = FREE) -> None:
        if var in self.bounds:
            raise ValueError(f"variable {var} already registered")
        self.bounds[var] = bound

    def clone(self) -> "LinearSystem":
        other = LinearSystem(self.bounds)
        other.rows = {p: (dict(c), k) for p, (c, k) in self.rows.items()}
        other.consistent = self.consistent
        return other

    # -- equality rows ----------------------------------------------------

    def add_equation(self, coeffs: Mapping[int, Fraction], const: Fraction) -> bool:
        """Add ``sum coeffs[v]*v = const``; returns consistency."""
        if not self.consistent:
            return False
        c: dict[int, Fraction] = {}
        k = Fraction(const)
        for v, a in coeffs.items():
            if a == 0:
                continue
            row = self.rows.get(v)
            if row is None:
                nv = c.get(v, ZERO) + a
                if nv:
                    c[v] = nv
                else:
                    del c[v]
            else:
                rc, rk = row
                k -= a * rk
                for w, b in rc.items():
                    nv = c.get(w, ZERO) + a * b
                    if nv:
                        c[w] = nv
                    else:
                        c.pop(w, None)
        c = {v: a for v, a in c.items() if a}
        if not c:
            if k != 0:
                self.consistent = False
            return self.consistent
        p = min(c)
        ap = c.pop(p)
        new_coeffs = {w: -a / ap for w, a in c.items()}
        new_const = k / ap
        for q, (qc, qk) in list(self.rows.items()):
            a = qc.get(p)
            if a is None:
                continue
            del qc[p]
            for w, b in new_coeffs.items():
                nv = qc.get(w, ZERO) + a * b
                if nv:
                    qc[w] = nv
                else:
                    qc.pop(w, None)
            self.rows[q] = (qc, qk + a * new_const)
        self.rows[p] = (new_coeffs, new_const)
        return True

    # -- queries -----------------------------------------------------------

    def pinned(self, var: int) -> Optional[Fraction]:
        row = self.rows.get(var)
        if row is not None and not row[0]:
            return row[1]
        return None

    def free_variables(self) -> list[int]:
        return sorted(v for v in self.bounds if v not in self.rows)

    def dimension(self, among: Optional[Iterable[int]] = None) -> int:
        if among is None:
            return len(self.free_variables())
        return sum(1 for v in among if v in self.bounds and self.pinned(v) is None)

    # -- interval propagation (sound incompleteness: only proves emptiness)

    def propagation_infeasible(self) -> bool:
        if not self.consistent:
            return True
        for p, (coeffs, const) in self.rows.items():
            lo, lo_s, hi, hi_s = const, False, const, False
            for w, a in coeffs.items():
                b = self.bounds.get(w, FREE)
                if a > 0:
                    wl, wls, wh, whs = b.lo, b.lo_strict, b.hi, b.hi_strict
                else:
                    wl, wls, wh, whs = b.hi, b.hi_strict, b.lo, b.lo_strict
                if lo is not None:
                    lo, lo_s = (lo + a * wl, lo_s or wls) if wl is not None else (None, False)
                if hi is not None:
                    hi, hi_s = (hi + a * wh, hi_s or whs) if wh is not None else (None, False)
            pb = self.bounds.get(p, FREE)
            if pb.hi is not None and lo is not None:
                if lo > pb.hi or (lo == pb.hi and (lo_s or pb.hi_strict)):
                    return True
            if pb.lo is not None and hi is not None:
                if hi < pb.lo or (hi == pb.lo and (hi_s or pb.lo_strict)):
                    return True
        return False

    # -- exact feasibility --------------------------------------------------

    def _inequalities(self) -> list[tuple[dict[int, Fraction], Fraction, bool]]:
        """Bound constraints over free variables, as (coeffs, const, strict)
        meaning ``sum coeffs[v]*v <= const`` (strict <)."""
        ineqs = []

        def bound_rows(expr: dict[int, Fraction], shift: Fraction, b: Bound):
            if b.hi is not None:
                ineqs.append((dict(expr), b.hi - shift, b.hi_strict))
            if b.lo is not None:
                ineqs.append(({v: -a for v, a in expr.items()}, shift - b.lo, b.lo_strict))

        for v, b in self.bounds.items():
            if v in self.rows:
                coeffs, const = self.rows[v]
                bound_rows(coeffs, const, b)
            else:
                bound_rows({v: Fraction(1)}, ZERO, b)
        return [(c, k, s) for c, k, s in ineqs if c or k < 0 or (s and k <= 0)]

    def feasible_with_bounds(self, max_rows: int = 20000) -> bool:
        """Exact test that the solution set intersects the bound box."""
        if not self.consistent:
            return False
        ineqs = self._inequalities()
        # constant rows first
        pending = []
        for c, k, s in ineqs:
            if not c:
                if k < 0 or (s and k == 0):
                    return False
            else:
                pending.append((c, k, s))
        return _fourier_motzkin(pending, max_rows)

    # -- transcript support --------------------------------------------------

    def dump(self, names: Optional[dict[int, str]] = None) -> str:
        """Human-readable equations of the current echelon form."""
        def name(v: int) -> str:
            return names[v] if names and v in names else f"x{v}"

        lines = []
        for p in sorted(self.rows):
            coeffs, const = self.rows[p]
            terms = [str(const)] if const or not coeffs else ([str(const)] if const else [])
            for w in sorted(coeffs):
                a = coeffs[w]
                sign = "+" if a >= 0 else "-"
                terms.append(f"{sign} {abs(a)}*{name(w)}")
            rhs = " ".join(terms) if terms else "0"
            lines.append(f"{name(p)} = {rhs}")
        if not self.consistent:
            lines.append("INCONSISTENT")
        return "\n".join(lines)

    # -- deterministic sampling ---------------------------------------------

    def free_range(self, v: int) -> Bound:
        return self.bounds.get(v, FREE)

    def evaluate(self, assignment: dict[int, Fraction]) -> Optional[dict[int, Fraction]]:
        """Extend values for all free variables to a full solution, or None
        if some variable lands outside its bounds."""
        full = dict(assignment)
        for p, (coeffs, const) in self.rows.items():
            val = const
            for w, a in coeffs.items():
                if w not in full:
                    return None
                val += a * full[w]
            full[p] = val
        for v, b in self.bounds.items():
            if v in full and not b.contains(full[v]):
                return None
        return full

    def sample_points(self, max_dim: int = 2) -> list[dict[int, Fraction]]:
        """Deterministic in-box samples of the solution set.

        Empty when the free dimension exceeds max_dim or no grid point
        clears every bound (callers must treat that as inconclusive).
        """
        free = self.free_variables()
        if len(free) > max_dim:
            return []
        grids = []
        for v in free:
            b = self.bounds.get(v, FREE)
            grids.append(_grid_values(b))
        points = []
        for combo in _product(grids):
            full = self.evaluate(dict(zip(free, combo)))
            if full is not None:
                points.append(full)
        return points


def _grid_values(b: Bound) -> list[Fraction]:
    if b.lo is not None and b.hi is not None:
        span = b.hi - b.lo
        if span == 0:
            return [b.lo]
        return [b.lo + span * f for f in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))]
    if b.lo is not None:
        return [b.lo + d for d in (Fraction(1, 3), Fraction(1), Fraction(3))]
    if b.hi is not None:
        return [b.hi - d for d in (Fraction(1, 3), Fraction(1), Fraction(3))]
    return [ZERO, Fraction(1), Fraction(-1)]


def _product(grids: list[list[Fraction]]):
    if not grids:
        yield ()
        return
    for head in grids[0]:
        for rest in _product(grids[1:]):
            yield (head,) + rest


def _normalize(coeffs: dict[int, Fraction], const: Fraction, strict: bool):
    items = tuple(sorted(coeffs.items()))
    denom = 1
    for _, a in items:
        denom = denom * a.denominator // _gcd(denom, a.denominator)
    denom = denom * const.denominator // _gcd(denom, const.denominator)
    ints = [int(a * denom) for _, a in items] + [int(const * denom)]
    g = 0
    for x in ints:
        g = _gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return (tuple((v, c) for (v, _), c in zip(items, ints[:-1])), ints[-1], strict)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a else 1


def _fourier_motzkin(ineqs: list[tuple[dict[int, Fraction], Fraction, bool]], max_rows: int) -> bool:
    """Decide satisfiability of strict/non-strict <= constraints."""
    seen = set()
    rows = []
    for c, k, s in ineqs:
        key = _normalize(c, k, s)
        if key not in seen:
            seen.add(key)
            rows.append((c, k, s))
    while True:
        vars_present: dict[int, list[int]] = {}
        for idx, (c, _, _) in enumerate(rows):
            for v in c:
                vars_present.setdefault(v, []).append(idx)
        if not vars_present:
            return all(k > 0 or (k == 0 and not s) for _, k, s in rows)
        # pick the variable with the fewest pairings, ties by id
        def cost(v: int) -> tuple[int, int]:
            pos = sum(1 for i in vars_present[v] if rows[i][0][v] > 0)
            neg = len(vars_present[v]) - pos
            return (pos * neg, v)

        v = min(vars_present, key=cost)
        uppers, lowers, others = [], [], []
        for c, k, s in rows:
            a = c.get(v)
            if a is None:
                others.append((c, k, s))
            elif a > 0:
                uppers.append((c, k, s))
            else:
                lowers.append((c, k, s))
        new_rows = others
        seen = {_normalize(c, k, s) for c, k, s in others}
        for cu, ku, su in uppers:
            au = cu[v]
            for cl, kl, sl in lowers:
                al = -cl[v]
                comb: dict[int, Fraction] = {}
                for w, a in cu.items():
                    if w != v:
                        comb[w] = a / au
                for w, a in cl.items():
                    if w != v:
                        nv = comb.get(w, ZERO) + a / al
                        if nv:
                            comb[w] = nv
                        else:
                            comb.pop(w, None)
                kc = ku / au + kl / al
                sc = su or sl
                if not comb:
                    if kc < 0 or (sc and kc == 0):
                        return False
                    continue
                key = _normalize(comb, kc, sc)
                if key not in seen:
                    seen.add(key)
                    new_rows.append((comb, kc, sc))
        rows = new_rows
        if len(rows) > max_rows:
            raise FeasibilityOverflow(f"working set grew past {max_rows} rows")
        if not rows:
            return True
