import math

import pytest

from tilesearch.equiangular import (
    _labels_of,
    load_curated,
    realize_numeric,
    realize_survivor,
    run_equiangular,
)
from tilesearch.planegraph import iter_planar_code_file
from tilesearch.search import run_search
from tilesearch.shapes import TileShape

from fixtures import fixture_candidate
from test_filters import DIAGONAL_PAIR


@pytest.fixture(scope="module")
def corpus(corpus_equiangular_n5):
    return list(iter_planar_code_file(corpus_equiangular_n5))


@pytest.fixture(scope="module")
def run3(corpus):
    return run_equiangular(5, 3, corpus=corpus)


@pytest.fixture(scope="module")
def run4(corpus):
    return run_equiangular(5, 4, corpus=corpus)


class TestLabelParsing:
    def test_refined_names_roundtrip(self):
        assert _labels_of("salar") == ("sa", "la", "r")
        assert _labels_of("mamar") == ("ma", "ma", "r")
        assert _labels_of("arro") == ("a", "r", "r", "o")

    def test_curated_file_parses(self):
        entries3 = load_curated(3)
        entries4 = load_curated(4)
        assert len(entries3) == 3
        assert len(entries4) == 8
        assert all(len(code) % 2 == 0 for code in entries3)


class TestRunCounts:
    def test_triangle_survivors(self, run3):
        assert run3.survivor_count == 15

    def test_quadrilateral_survivors(self, run4):
        assert run4.survivor_count == 27

    def test_curated_tallies(self, run3, run4):
        assert len(run3.curated_invalid) == 3
        assert len(run4.curated_invalid) == 8
        assert run3.tiling_count == 12
        assert run4.tiling_count == 19
        assert run3.tiling_count + run4.tiling_count == 31

    def test_survivors_sorted_by_code(self, run3):
        codes = [s.code_hex for s in run3.survivors]
        assert codes == sorted(codes)

    def test_quadrilateral_angle_pattern(self, run4):
        # every surviving quadrilateral system pins two right angles and
        # couples the other two to a straight angle
        from fractions import Fraction
        from tilesearch.equations import build_topology
        from tilesearch.equiangular import _replay_angle_system, _parse_assignment

        for s in run4.survivors:
            topo = build_topology(s.candidate)
            cert = s.certificates[0]
            labels = _labels_of(cert.shape)
            shape = TileShape(4, labels)
            rec = cert.survivors[0]
            sys_ = _replay_angle_system(topo, shape, _parse_assignment(rec))
            pinned_right = sum(
                1 for j in range(4) if sys_.pinned(j) == Fraction(1, 2)
            )
            assert pinned_right == 2
            others = [j for j in range(4) if sys_.pinned(j) != Fraction(1, 2)]
            ok = sys_.add_equation({others[0]: Fraction(1), others[1]: Fraction(1)}, Fraction(1))
            assert ok and sys_.consistent

    def test_coarse_labels_keep_every_refined_survivor(self, run3):
        from tilesearch.filters import apply_filters
        from tilesearch.shapes import enumerate_labelings

        coarse = enumerate_labelings(3, "rectangle")  # a/r/o alphabet, triangles
        for s in run3.survivors:
            report, constraints = apply_filters(s.candidate, 3, "equiangular")
            assert report.verdict == "keep"
            assert any(
                run_search(s.candidate, shape, "equiangular", constraints=constraints).outcome
                == "survived"
                for shape in coarse
            )


class TestRealization:
    def test_diagonal_pair_is_right_isosceles(self):
        cand = fixture_candidate(DIAGONAL_PAIR)
        from tilesearch.filters import apply_filters

        report, constraints = apply_filters(cand, 3, "equiangular")
        assert report.verdict == "keep"
        cert = run_search(cand, TileShape(3, ("ma", "ma", "r")), "equiangular",
                          constraints=constraints)
        assert cert.outcome == "survived"
        r = realize_numeric(cand, TileShape(3, ("ma", "ma", "r")), cert.survivors[0])
        assert r.status == "realized"
        assert r.tan_smallest == pytest.approx(1.0, abs=1e-8)

    def test_triangle_families(self, run3):
        tans = set()
        for s in run3.survivors:
            if s.code_hex in set(run3.curated_invalid):
                continue
            r = realize_survivor(s)
            assert r.status == "realized", (s.code_hex, r.note)
            tans.add(round(r.tan_smallest, 6))
        cubic_root = _real_root_of_cubic()
        assert tans == {
            round(1.0, 6),
            round(0.5, 6),
            round(cubic_root, 6),
        }

    def test_curated_survivors_do_not_realize(self, run3):
        for s in run3.survivors:
            if s.code_hex in set(run3.curated_invalid):
                r = realize_survivor(s)
                assert r.status != "realized"


def _real_root_of_cubic() -> float:
    # real root of a^3 - a^2 + 2a - 1
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = (lo + hi) / 2
        if mid**3 - mid**2 + 2 * mid - 1 < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@pytest.mark.slow
class TestBlueFamilies:
    def test_two_quads_cap_alpha_at_arctan_half(self, run4):
        """Exactly two quadrilateral families refuse angles above
        arctan(1/2); the rest realize on both sides of it."""
        capped = 0
        invalid = set(run4.curated_invalid)
        for s in run4.survivors:
            if s.code_hex in invalid:
                continue
            low = _realizes_at(s, 0.30)
            high = _realizes_at(s, 0.55)
            if low and not high:
                capped += 1
        assert capped == 2


def _realizes_at(report, alpha: float) -> bool:
    for cert in report.certificates:
        labels = _labels_of(cert.shape)
        shape = TileShape(len(labels), labels)
        for rec in cert.survivors:
            r = realize_numeric(report.candidate, shape, rec, pin_alpha=alpha)
            if r.status == "realized":
                return True
    return False
