from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import assume, given
import hypothesis.strategies as st

from dirhyp import boundary as bd
from dirhyp import oracles
from dirhyp.core import Digraph
from dirhyp.criteria import random_rho_eps
from dirhyp.extnat import INF
from dirhyp.families import FamilySpec, rays, realize

from conftest import digraphs

BIG = float("inf")


@st.composite
def weight_matrices(draw, max_size=6):
    k = draw(st.integers(1, max_size))
    entry = st.fractions(min_value=0, max_value=1, max_denominator=12)
    return [[Fraction(0) if i == j else draw(entry) for j in range(k)] for i in range(k)]


@given(weight_matrices())
def test_chain_distance_matches_chain_enumeration(w):
    assert bd.chain_distance(w) == oracles.chain_distance(w)


def test_chain_distance_two_points():
    d = bd.chain_distance([[0, 0.5], [0.9, 0]])
    assert d[0][1] == 0.5 and d[1][0] == 0.9


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 8))
def test_generated_matrices_meet_the_two_sided_bound(seed, size):
    rng = np.random.default_rng(seed)
    ep = Fraction(int(rng.integers(101, 142)), 100)
    w = random_rho_eps(rng, size, ep)
    assert not bd.three_point_failures(w, ep)
    d = oracles.chain_distance(w)
    for i in range(size):
        for j in range(size):
            if i != j:
                assert (3 - 2 * ep) * w[i][j] <= d[i][j] <= w[i][j]
    assert bd.verify_chain_inequality(w, ep).ok


def test_three_point_failure_skips_the_bound():
    w = [[0, Fraction(1)], [Fraction(1, 10), 0]]
    w3 = [[0, Fraction(1), Fraction(1, 10)], [Fraction(1), 0, Fraction(1)],
          [Fraction(1), Fraction(1, 10), 0]]
    rep = bd.verify_chain_inequality(w3, Fraction(6, 5))
    assert not rep.hypothesis_holds and not rep.ok and not rep.failures
    assert bd.verify_chain_inequality([[0]], Fraction(6, 5)).ok
    assert not bd.verify_chain_inequality(w, Fraction(3, 2)).hypothesis_holds


def _hits_all_paths(D, cut, sources, targets):
    seen = [s for s in sources if s not in cut]
    reach = set(seen)
    while seen:
        u = seen.pop()
        for v in D.successors(u):
            if v not in cut and v not in reach:
                reach.add(v)
                seen.append(v)
    return not (reach & set(targets))


@given(digraphs(max_n=6), st.data())
def test_disjoint_paths_equal_least_vertex_cut(D, data):
    sub = st.lists(st.integers(0, D.n - 1), min_size=1, max_size=3, unique=True)
    S, T = data.draw(sub), data.draw(sub)
    cut = next(k for k in range(D.n + 1)
               if any(_hits_all_paths(D, set(c), S, T) for c in combinations(range(D.n), k)))
    assert bd.max_vertex_disjoint_paths(D, S, T) == cut


@given(digraphs(max_n=7), st.integers(0, 3))
def test_independence_is_maximum(D, r):
    d = oracles.distances(D.n, D.edges)
    members = [v for v in range(D.n) if d[0][v] <= r]

    def indep(c):
        return all(d[a][b] == BIG and d[b][a] == BIG for a, b in combinations(c, 2))

    best = max(k for k in range(len(members) + 1)
               if any(indep(c) for c in combinations(members, k)))
    res = bd.independence(D, 0, r)
    assert res.exact and res.size == best and indep(res.vertices)


@given(digraphs(max_n=7), st.data())
def test_base_check_definition(D, data):
    S = data.draw(st.lists(st.integers(0, D.n - 1), max_size=3, unique=True))
    d = oracles.distances(D.n, D.edges)
    uncovered = [v for v in range(D.n) if not any(d[s][v] < BIG or d[v][s] < BIG for s in S)]
    assert bd.base_check(D, S) == (not uncovered, uncovered)


@given(digraphs(max_n=5), st.data())
def test_rho_on_vertices_matches_geodesic_enumeration(D, data):
    S = data.draw(st.lists(st.integers(0, D.n - 1), min_size=1, max_size=2, unique=True))
    assume(bd.base_check(D, S)[0])
    d = oracles.distances(D.n, D.edges)
    m = bd.rho_matrix(D, S, list(range(D.n)))
    for a in range(D.n):
        for b in range(D.n):
            if a == b:
                want = INF
            elif d[a][b] == BIG:
                want = 0
            else:
                want = min(min(d[s][p], d[p][s]) for s in S
                           for path in oracles.geodesic_vertex_paths(D.n, D.edges, a, b)
                           for p in path)
            assert m.rho[a][b] == want
            assert m.rho_eps[a][b] == bd.rho_weight(want, Fraction(2))


def test_rho_through_base_is_zero():
    D = Digraph(3, [(0, 1), (1, 2)])
    m = bd.rho_matrix(D, [1], [0, 2])
    assert m.rho[0][1] == 0 and m.rho_eps[0][1] == 1


def test_rho_rejects_non_base():
    D = Digraph(3, [(0, 1)])
    with pytest.raises(ValueError, match="not a base"):
        bd.rho_matrix(D, [0], [0, 1])


def test_ex12_2_witnesses_and_relation():
    res = bd.ray_leq_witness("ex12_2", "v-ray", "x-anti-ray", 2, 3, 20)
    assert res.status == bd.CERTIFIED
    for w in res.witnesses:
        labs = w.path.labelled(realize("ex12_2", 20).digraph)
        assert len(labs) == 3 and labs[0][0] == "v" and labs[1][0] == "w" and labs[2][0] == "x"
    back = bd.ray_leq_witness("ex12_2", "x-anti-ray", "v-ray", 10, 1, 20)
    assert back.status == bd.REFUTED
    assert bd.disjoint_paths("ex12_2", "x-anti-ray", "v-ray", 20) == 0


@pytest.mark.parametrize("name, classes", [
    ("nat_line", [["x-ray"]]),
    ("ex16_5", [["a-ray", "ab-ray"]]),
    ("ex14_2", [["x-ray"], ["y-anti-ray"], ["z-anti-ray"]]),
])
def test_boundary_classes(name, classes):
    bp = bd.boundary_partition(name, 20, 4)
    assert not bp.provisional
    assert sorted(sorted(c) for c in bp.classes) == classes


@pytest.mark.parametrize("name", ["nat_line", "ex12_2", "ex14_2"])
def test_refinement_is_total(name):
    ref = bd.refinement_map(name, 20)
    assert ref.ok


def test_ends_of_ex12_2_are_cross_validated():
    ends = bd.ends_partition("ex12_2", 20)
    assert len(ends.classes) == 2
    assert all(ends.cross_validation.values())
    assert ends.growth[("v-ray", "x-anti-ray")][-1] >= 3


def test_doubling_schedule():
    assert bd.doubling_schedule(20) == (5, 10, 20)
    with pytest.raises(ValueError):
        bd.doubling_schedule(2)


def test_extraction_returns_a_geodesic_ray():
    spec, rep = bd.extract_geodesic_ray("nat_line", "x-ray", 10)
    assert rep.labels == [f"x{i}" for i in range(11)]
    assert rep.out_bound == 0 and rep.in_bound == 0
    spec, rep = bd.extract_geodesic_ray("ex16_5", "ab-ray", 10)
    D = realize("ex16_5", 10).digraph
    idx = [D.index(lab) for lab in rep.labels]
    assert D.distances[idx[0], idx[-1]] == len(idx) - 1
    assert rep.out_bound is not INF and rep.in_bound is not INF


def test_ex12_2_neighbourhoods():
    R = {r.name: r for r in rays("ex12_2")}
    for i in (8, 9):
        for lab in (f"u{i}", f"v{i}"):
            assert bd.neighborhood_member("ex12_2", R["v-ray"], lab, "x0", 2, "C-", n=20,
                                          window=(10, 18))
        for side in ("C-", "C+"):
            for ray in R.values():
                assert not bd.neighborhood_member("ex12_2", ray, f"w{i}", "x0", 2, side,
                                                  n=20, window=(10, 18))


def test_tree_has_no_single_vertex_base():
    D = realize(FamilySpec("ex13_4_tree"), 4).digraph
    assert not bd.base_check(D, ["x0"])[0]
    assert bd.base_check(D, range(D.n))[0]
