from fractions import Fraction

import pytest
from hypothesis import given

from dirhyp import oracles
from dirhyp.core import Digraph
from dirhyp.extnat import INF
from dirhyp.geodesics import (DirectedWalk, UnreachableError, simple_walks, count_geodesics, enumerate_geodesics,
                              geodesic_paths, is_geodesic, is_quasi_geodesic, walks_through)

from conftest import digraphs


@given(digraphs(max_n=6))
def test_geodesic_counts_match_enumeration(D):
    for x in range(D.n):
        for y in range(D.n):
            edges = oracles.geodesic_edge_sequences(D.n, D.edges, x, y)
            paths = oracles.geodesic_vertex_paths(D.n, D.edges, x, y)
            if D.distances[x, y] == INF:
                assert edges == []
                with pytest.raises(UnreachableError):
                    count_geodesics(D, x, y)
                continue
            assert count_geodesics(D, x, y) == len(edges)
            assert count_geodesics(D, x, y, distinct_vertices=True) == len(paths)
            found, truncated = geodesic_paths(D, x, y)
            assert not truncated and found == paths


@given(digraphs(max_n=6))
def test_enumerated_walks_are_geodesics(D):
    for x in range(D.n):
        for y in range(D.n):
            if D.distances[x, y] == INF:
                continue
            summary = enumerate_geodesics(D, x, y)
            assert summary.count == len(summary.sample)
            for w in summary.sample:
                assert w.is_valid(D) and is_geodesic(D, w)
                assert (w.start, w.end) == (x, y)


def test_parallel_edges_count_separately():
    D = Digraph(3, [(0, 1), (0, 1), (1, 2)])
    assert count_geodesics(D, 0, 2) == 2
    assert count_geodesics(D, 0, 2, distinct_vertices=True) == 1


def test_quasi_geodesic_detour():
    # 0 -> 1 -> 2 directly, or the detour 0 -> 3 -> 4 -> 2
    D = Digraph(5, [(0, 1), (1, 2), (0, 3), (3, 4), (4, 2)])
    detour = walks_through([0, 3, 4, 2])
    assert not is_geodesic(D, detour)
    assert is_quasi_geodesic(D, detour, 1, 1)
    assert is_quasi_geodesic(D, detour, Fraction(3, 2), 0)
    assert not is_quasi_geodesic(D, detour, 1, 0)


def test_walk_str_and_labels():
    D = Digraph(2, [(0, 1)], ["s", "t"])
    w = walks_through([0, 1])
    assert isinstance(w, DirectedWalk) and len(w) == 1
    assert w.labelled(D) == ["s", "t"]


def _brute_simple(D, x, y, max_len):
    out = []

    def go(path):
        u = path[-1]
        if u == y:
            out.append(tuple(path))
            return
        if len(path) - 1 == max_len:
            return
        for v in sorted(set(D.successors(u))):
            if v not in path:
                go(path + [v])

    go([x])
    return sorted(out)


@given(digraphs(max_n=6))
def test_simple_walks_match_brute_force(D):
    for x in range(D.n):
        for y in range(D.n):
            found, truncated = simple_walks(D, x, y, 4)
            assert not truncated
            assert sorted(found) == _brute_simple(D, x, y, 4)
