"""Independent oracles: brute-force isomorphism, brute graph enumeration,
and a naive rational elimination solver.  These deliberately share no code
with the package internals they check."""

from fractions import Fraction
from itertools import permutations

import networkx as nx

from tilesearch.planegraph import PlaneGraph


def to_nx(g: PlaneGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.vertex_count))
    G.add_edges_from(g.edges)
    return G


def brute_isomorphic(g1: PlaneGraph, g2: PlaneGraph) -> bool:
    """Abstract-graph isomorphism by permutation search (small graphs only)."""
    n = g1.vertex_count
    if n != g2.vertex_count or g1.edge_count != g2.edge_count:
        return False
    deg1 = sorted(len(r) for r in g1.rotation)
    deg2 = sorted(len(r) for r in g2.rotation)
    if deg1 != deg2:
        return False
    adj2 = g2.adjacency
    for perm in permutations(range(n)):
        ok = True
        for u, rot in enumerate(g1.rotation):
            if len(rot) != len(g2.rotation[perm[u]]):
                ok = False
                break
            if any(perm[v] not in adj2[perm[u]] for v in rot):
                ok = False
                break
        if ok:
            return True
    return False


def nx_three_connected(G: nx.Graph) -> bool:
    n = G.number_of_nodes()
    if n < 4 or not nx.is_connected(G):
        return False
    nodes = list(G.nodes)
    for i in range(n):
        for j in range(i + 1, n):
            H = G.copy()
            H.remove_nodes_from([nodes[i], nodes[j]])
            if H.number_of_nodes() > 0 and not nx.is_connected(H):
                return False
    return True


def brute_enumerate_graphs(n: int, min_degree: int):
    """Every 3-connected planar graph on n vertices with the degree floor,
    one representative per isomorphism class, as networkx graphs.

    Enumerates complements with bounded maximum degree, so it is only
    usable when n - 1 - min_degree is small.
    """
    max_codeg = n - 1 - min_degree
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    total_pairs = len(pairs)
    min_coedges = total_pairs - (3 * n - 6)  # planarity edge bound
    survivors: list[nx.Graph] = []

    codeg = [0] * n
    chosen: list[tuple[int, int]] = []

    def leaf_check():
        if total_pairs - len(chosen) > 3 * n - 6:
            return
        G = nx.complement(nx.Graph(chosen)) if chosen else nx.complete_graph(n)
        G.add_nodes_from(range(n))
        if min(dict(G.degree).values()) < min_degree:
            return
        ok, _ = nx.check_planarity(G)
        if not ok:
            return
        if not nx_three_connected(G):
            return
        for rep in survivors:
            if nx.is_isomorphic(rep, G):
                return
        survivors.append(G)

    def rec(idx: int, coedges: int):
        if idx == total_pairs:
            if coedges >= min_coedges:
                leaf_check()
            return
        remaining = total_pairs - idx
        if coedges + remaining < min_coedges:
            return
        i, j = pairs[idx]
        # skip pair (keeps the edge in the graph)
        rec(idx + 1, coedges)
        # take pair into the complement (removes the edge)
        if codeg[i] < max_codeg and codeg[j] < max_codeg:
            codeg[i] += 1
            codeg[j] += 1
            chosen.append((i, j))
            rec(idx + 1, coedges + 1)
            chosen.pop()
            codeg[i] -= 1
            codeg[j] -= 1

    rec(0, 0)
    return survivors


def naive_solve_verdict(rows: list[tuple[dict[int, Fraction], Fraction]]) -> bool:
    """Naive dense Gaussian elimination over the rationals.

    Returns True when the equality system is consistent.  This is the
    reference implementation for the incremental engine.
    """
    varset = sorted({v for coeffs, _ in rows for v in coeffs})
    index = {v: i for i, v in enumerate(varset)}
    m = [
        [Fraction(coeffs.get(v, 0)) for v in varset] + [Fraction(const)]
        for coeffs, const in rows
    ]
    ncols = len(varset)
    piv_row = 0
    for col in range(ncols):
        sel = None
        for r in range(piv_row, len(m)):
            if m[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        m[piv_row], m[sel] = m[sel], m[piv_row]
        pv = m[piv_row][col]
        for r in range(len(m)):
            if r != piv_row and m[r][col] != 0:
                f = m[r][col] / pv
                for c in range(col, ncols + 1):
                    m[r][c] -= f * m[piv_row][c]
        piv_row += 1
        if piv_row == len(m):
            break
    for r in range(len(m)):
        if all(m[r][c] == 0 for c in range(ncols)) and m[r][ncols] != 0:
            return False
    return True
