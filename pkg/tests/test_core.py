import numpy as np
import pytest
from hypothesis import given

from dirhyp import oracles
from dirhyp.core import (Digraph, ParseError, ball, ball_mask, dump_digraph, from_networkx,
                         load_digraph, scc, subdivide)
from dirhyp.extnat import INF, from_json, to_json

from conftest import digraphs


def _oracle_matrix(D):
    d = oracles.distances(D.n, D.edges)
    return [[INF if v == float("inf") else int(v) for v in row] for row in d]


@given(digraphs(max_n=8))
def test_distances_match_floyd_warshall(D):
    assert D.distances.to_lists() == _oracle_matrix(D)


@given(digraphs(max_n=7))
def test_round_trip_text_format(D):
    assert load_digraph(dump_digraph(D)) == D


def test_labels_survive_round_trip():
    D = Digraph(3, [(0, 1), (1, 2)], ["a", "b", "c"])
    back = load_digraph(dump_digraph(D))
    assert back.labels == ("a", "b", "c")
    assert back.index("b") == 1


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("x y\n", 1),
    ("2 1\n0 5\n", 2),
    ("2 2\n0 1\n", 2),
    ("2 1\n0\n", 2),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(ParseError, match=f"line {line}"):
        load_digraph(text)


@given(digraphs(max_n=7))
def test_scc_matches_mutual_reachability(D):
    d = _oracle_matrix(D)
    comps = scc(D)
    where = {v: i for i, c in enumerate(comps) for v in c}
    assert sorted(where) == list(range(D.n))
    for u in range(D.n):
        for v in range(D.n):
            mutual = d[u][v] != INF and d[v][u] != INF
            assert (where[u] == where[v]) == mutual
    assert [min(c) for c in comps] == sorted(min(c) for c in comps)


@given(digraphs(max_n=7))
def test_ball_is_distance_threshold(D):
    d = _oracle_matrix(D)
    for r in range(3):
        for x in range(D.n):
            assert ball(D, x, r, "out") == frozenset(v for v in range(D.n) if d[x][v] <= r)
            assert ball(D, x, r, "in") == frozenset(v for v in range(D.n) if d[v][x] <= r)
    mask = ball_mask(D, [0], 1, both=True)
    want = {v for v in range(D.n) if d[0][v] <= 1 or d[v][0] <= 1}
    assert set(np.flatnonzero(mask).tolist()) == want


@given(digraphs(max_n=5, loops=False))
def test_subdivision_scales_distances(D):
    k = 3
    S = subdivide(D, k)
    assert S.labels[:D.n] == D.labels
    for u in range(D.n):
        for v in range(D.n):
            a, b = D.distances[u, v], S.distances[S.index(D.labels[u]), S.index(D.labels[v])]
            assert b == (INF if a == INF else k * a)


def test_extnat_json():
    from fractions import Fraction
    assert to_json(INF) == "inf" and from_json("inf") is INF
    assert to_json(Fraction(3, 2)) == "3/2" and from_json("3/2") == Fraction(3, 2)
    assert INF + 5 is INF and INF > 10 ** 12 and not INF < 3


@given(digraphs(max_n=8, parallel=False))
def test_distances_and_components_agree_with_networkx(D):
    nx = pytest.importorskip("networkx")
    G = nx.DiGraph()
    G.add_nodes_from(range(D.n))
    G.add_edges_from(D.edges)
    lengths = dict(nx.all_pairs_shortest_path_length(G))
    for u in range(D.n):
        for v in range(D.n):
            assert D.distances[u, v] == lengths[u].get(v, INF)
    theirs = sorted(sorted(c) for c in nx.strongly_connected_components(G))
    assert sorted(sorted(c) for c in scc(D)) == theirs
    assert from_networkx(G).distances.to_lists() == D.distances.to_lists()
