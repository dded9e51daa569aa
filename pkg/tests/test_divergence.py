from collections import deque
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from dirhyp import divergence as dv
from dirhyp import oracles
from dirhyp.core import Digraph
from dirhyp.extnat import INF
from dirhyp.geodesics import walks_through

from conftest import digraphs

BIG = float("inf")


def _avoiding_length(n, edges, sources, targets, forbidden):
    dist = {s: 0 for s in sources if s not in forbidden}
    queue = deque(sorted(dist))
    while queue:
        u = queue.popleft()
        if u in targets:
            return dist[u]
        for a, b in edges:
            if a == u and b not in forbidden and b not in dist:
                dist[b] = dist[u] + 1
                queue.append(b)
    return BIG


def _brute_envelope(D, e0, r_grid):
    d = oracles.distances(D.n, D.edges)
    geos = {}
    for a in range(D.n):
        for b in range(D.n):
            geos[(a, b)] = oracles.geodesic_vertex_paths(D.n, D.edges, a, b)
    best = {r: BIG for r in r_grid}
    for x in range(D.n):
        at_x = sorted({p for (a, b), ps in geos.items() if x in (a, b) for p in ps})
        for P1 in at_x:
            for R in range(len(P1)):
                u = P1[R] if P1[0] == x else P1[len(P1) - 1 - R]
                for P2 in at_x:
                    if min(d[u][q] for q in P2) <= e0:
                        continue
                    for r in r_grid:
                        forbidden = {v for v in range(D.n)
                                     if d[x][v] <= R + r or d[v][x] <= R + r}
                        L = _avoiding_length(D.n, D.edges, set(P1), set(P2), forbidden)
                        best[r] = min(best[r], L)
    return best


@given(digraphs(max_n=6, parallel=False), st.integers(0, 1))
def test_divergence_envelope_matches_brute_force(D, e0):
    grid = range(3)
    scan = dv.scan_divergence(D, 0, e0, 1, grid)
    want = _brute_envelope(D, e0, grid)
    assert {r: (BIG if v is INF else v) for r, v in scan.envelope.items()} == want


def test_divergence_violation_paths_avoid_the_ball():
    # two long geodesics out of 0 joined far away
    edges = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (3, 7), (7, 6)]
    D = Digraph(8, edges)
    scan = dv.scan_divergence(D, 0, 0, 1, range(2))
    for x, R, r, L, path in scan.violations:
        assert len(path) - 1 == L
        assert all(D.distances[x, v] > R + r and D.distances[v, x] > R + r for v in path)


def test_point_at_and_config_validation():
    D = Digraph(3, [(0, 1), (1, 2)])
    P = walks_through([0, 1, 2])
    assert dv.point_at(D, P, 0, 1) == 1 and dv.point_at(D, P, 2, 0) == 2
    with pytest.raises(ValueError):
        dv.point_at(D, P, 0, 3)
    with pytest.raises(ValueError, match="marked point"):
        dv.DivergenceConfig(0, walks_through([0, 1]), P, 2, 0).validate(D)


def _quasi(d, path, gamma, c):
    for i in range(len(path)):
        for j in range(i, len(path)):
            if j - i > gamma * d[path[i]][path[j]] + c:
                return False
    return True


def _simple_paths(D, x, y, max_len):
    out = []

    def go(path):
        if path[-1] == y:
            out.append(tuple(path))
            return
        if len(path) - 1 == max_len:
            return
        for v in sorted({b for a, b in D.edges if a == path[-1]}):
            if v not in path:
                go(path + [v])

    go([x])
    return out


@given(digraphs(max_n=6), st.sampled_from([(1, 0), (1, 1), (Fraction(3, 2), 1), (2, 0)]))
def test_stability_defect_matches_brute_force(D, gc):
    gamma, c = gc
    d = oracles.distances(D.n, D.edges)
    for x in range(D.n):
        for y in range(D.n):
            if d[x][y] == BIG:
                continue
            bound = int(Fraction(gamma) * int(d[x][y]) + c)
            cands = [p for p in _simple_paths(D, x, y, bound) if _quasi(d, p, gamma, c)]
            kout = max(min(d[q][p] for q in b) for a in cands for b in cands for p in a)
            kin = max(min(d[p][q] for q in b) for a in cands for b in cands for p in a)
            rep = dv.stability_defect(D, x, y, gamma, c)
            assert rep.exhaustive and rep.candidates == len(cands)
            assert rep.kappa_out == kout and rep.kappa_in == kin


@st.composite
def qi_instances(draw):
    D1 = draw(digraphs(max_n=5))
    D2 = draw(digraphs(max_n=5))
    mapping = draw(st.lists(st.integers(0, D2.n - 1), min_size=D1.n, max_size=D1.n))
    gamma = draw(st.sampled_from([1, Fraction(3, 2), 2, 3]))
    c = draw(st.sampled_from([0, 1, Fraction(1, 2), 2]))
    return D1, D2, mapping, gamma, c


@given(qi_instances())
def test_qi_check_matches_direct_loop(inst):
    D1, D2, mapping, gamma, c = inst
    d1 = oracles.distances(D1.n, D1.edges)
    d2 = oracles.distances(D2.n, D2.edges)
    assert dv.qi_check(mapping, D1, D2, gamma, c).ok == oracles.qi_holds(d1, d2, mapping,
                                                                           gamma, c)


def test_qi_identity_and_minimal_grid():
    D = Digraph(4, [(0, 1), (1, 2), (2, 3)])
    assert dv.qi_check(list(range(4)), D, D, 1, 0).ok
    # collapse a two-way path onto a two-way edge
    D = Digraph(4, [(i, i + 1) for i in range(3)] + [(i + 1, i) for i in range(3)])
    E = Digraph(2, [(0, 1), (1, 0)])
    best, passing = dv.qi_minimal([0, 0, 1, 1], D, E, [1, 2, 3], [0, 1, 2])
    assert passing and best == min(passing)
    for g, c in passing:
        assert oracles.qi_holds(oracles.distances(4, D.edges), oracles.distances(2, E.edges),
                                [0, 0, 1, 1], g, c)


def test_qi_reports_each_violation_kind():
    D = Digraph(2, [(0, 1)])
    E = Digraph(3, [])
    res = dv.qi_check([0, 1], D, E, 1, 0)
    kinds = {v["kind"] for v in res.violations}
    assert {"upper-infinite", "co-density"} <= kinds
