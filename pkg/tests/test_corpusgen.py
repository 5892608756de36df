import pytest

from tilesearch.corpusgen import (
    K4_ROTATION,
    apexed_corpus,
    delete_edge,
    polyhedral_graphs,
    split_vertex,
    triangulations,
)
from tilesearch.planegraph import PlaneGraph, canonical_code, check_three_connected

from oracles import brute_enumerate_graphs, to_nx

import networkx as nx

# class sizes of plane triangulations (simplicial polyhedra) by vertices
TRIANGULATION_COUNTS = {4: 1, 5: 1, 6: 2, 7: 5, 8: 14, 9: 50, 10: 233}
# class sizes of all 3-connected simple planar graphs by vertices
POLYHEDRON_COUNTS = {4: 1, 5: 2, 6: 7, 7: 34, 8: 257}


def test_split_produces_triangulations():
    rot = K4_ROTATION
    child = split_vertex(rot, 0, 0, 1)
    g = PlaneGraph(child)
    g.validate()
    assert g.vertex_count == 5
    assert all(len(f) == 3 for f in g.faces)


def test_split_stack_case_makes_degree_three_vertex():
    child = split_vertex(K4_ROTATION, 0, 0, 1)
    degrees = sorted(len(r) for r in child)
    assert degrees == [3, 3, 4, 4, 4]


@pytest.mark.parametrize("n,count", sorted(TRIANGULATION_COUNTS.items()))
def test_triangulation_counts(n, count):
    if n > 9:
        pytest.skip("covered by the slow corpus tests")
    ts = triangulations(n)
    assert len(ts) == count
    for rotation in ts:
        g = PlaneGraph(rotation)
        g.validate()
        assert all(len(f) == 3 for f in g.faces)
        assert check_three_connected(g)


@pytest.mark.parametrize("n,count", sorted(POLYHEDRON_COUNTS.items()))
def test_polyhedral_graph_counts(n, count):
    if n > 7:
        pytest.skip("covered by the slow corpus tests")
    graphs = polyhedral_graphs(n)
    assert len(graphs) == count
    codes = {canonical_code(g) for g in graphs}
    assert len(codes) == len(graphs)
    for g in graphs:
        g.validate()
        assert check_three_connected(g)


@pytest.mark.slow
def test_polyhedral_graph_count_eight_vertices():
    assert len(polyhedral_graphs(8)) == POLYHEDRON_COUNTS[8]


def test_min_degree_four_matches_brute_force_small():
    for n in (6, 7):
        mine = polyhedral_graphs(n, min_degree=4)
        brute = brute_enumerate_graphs(n, min_degree=4)
        assert len(mine) == len(brute)
        for g in mine:
            G = to_nx(g)
            assert sum(1 for H in brute if nx.is_isomorphic(G, H)) == 1


@pytest.mark.slow
def test_min_degree_four_matches_brute_force_eight():
    mine = polyhedral_graphs(8, min_degree=4)
    brute = brute_enumerate_graphs(8, min_degree=4)
    assert len(mine) == len(brute)
    for g in mine:
        G = to_nx(g)
        assert sum(1 for H in brute if nx.is_isomorphic(G, H)) == 1


def test_deletion_keeps_embedding_valid():
    rot = triangulations(6)[0]
    g = PlaneGraph(rot)
    for a, b in g.edges:
        if len(rot[a]) > 3 and len(rot[b]) > 3:
            child = PlaneGraph(delete_edge(rot, a, b))
            child.validate()


def test_apexed_corpus_n3_determinism():
    first = apexed_corpus(3)
    second = apexed_corpus(3)
    assert [g.rotation for g in first] == [g.rotation for g in second]
    assert all(min(len(r) for r in g.rotation) >= 4 for g in first)
