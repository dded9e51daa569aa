import json
import math
import os
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from dirhyp import hyperbolicity as hy
from dirhyp import oracles
from dirhyp.core import Digraph, subdivide
from dirhyp.extnat import INF
from dirhyp.geodesics import walks_through

from conftest import digraphs


@given(digraphs(max_n=5))
def test_delta_matches_brute_force(D):
    assert hy.delta(D, "thin", "all").delta == oracles.delta(D.n, D.edges)
    assert hy.delta(D, "thin", "transitive").delta == oracles.delta(D.n, D.edges, True)


@given(digraphs(max_n=5))
def test_witness_realizes_reported_defect(D):
    for kind in ("thin", "slim"):
        res = hy.delta(D, kind)
        if res.witness is None:
            assert res.delta == 0
            continue
        res.witness.validate(D)
        assert hy.triangle_defect(D, res.witness, kind) == res.delta


@given(digraphs(max_n=5))
def test_slim_delta_matches_brute_force(D):
    want = oracles.delta(D.n, D.edges, slim=True)
    assert hy.delta(D, "slim").delta == (INF if want == float("inf") else want)


def _brute_on_triples(D, triples):
    d = oracles.distances(D.n, D.edges)
    best = 0
    for t in triples:
        for pat in range(8):
            ends = oracles._sides(t, pat)
            if any(d[a][b] == float("inf") for a, b in ends):
                continue
            for s0 in oracles.geodesic_vertex_paths(D.n, D.edges, *ends[0]):
                for s1 in oracles.geodesic_vertex_paths(D.n, D.edges, *ends[1]):
                    for s2 in oracles.geodesic_vertex_paths(D.n, D.edges, *ends[2]):
                        best = max(best, oracles.triangle_defect(d, (s0, s1, s2)))
    return best


@given(digraphs(max_n=5), st.data())
def test_delta_on_triples_matches_brute_force(D, data):
    vertex = st.integers(0, D.n - 1)
    triples = data.draw(st.lists(st.tuples(vertex, vertex, vertex), min_size=1, max_size=4))
    assert hy.delta_on_triples(D, triples).delta == _brute_on_triples(D, triples)


def _walk_counts_bounded(D, limit):
    n = D.n
    counts = [[0] * n for _ in range(n)]
    for x in range(n):
        frontier = {x: 1}
        counts[x][x] += 1
        for _ in range(limit):
            nxt = {}
            for u, w in frontier.items():
                for a, b in D.edges:
                    if a == u:
                        nxt[b] = nxt.get(b, 0) + w
            for v, w in nxt.items():
                counts[x][v] += w
            frontier = nxt
    return counts


@given(digraphs(max_n=6))
def test_zero_hyperbolic_means_unique_walks(D):
    ok, witness = hy.is_zero_hyperbolic(D)
    counts = _walk_counts_bounded(D, D.n + 1)
    assert ok == all(c <= 1 for row in counts for c in row)
    if not ok:
        a, b = witness
        assert (a.start, a.end) == (b.start, b.end) and a != b
        assert a.is_valid(D) and b.is_valid(D)


def test_three_cycle_defects():
    C = Digraph(3, [(0, 1), (1, 2), (2, 0)])
    assert not hy.is_zero_hyperbolic(C)[0]
    assert hy.delta(C).delta == 1
    assert hy.delta(subdivide(C, 2)).delta == 2


def test_path_is_zero_hyperbolic():
    P = Digraph(5, [(i, i + 1) for i in range(4)])
    assert hy.is_zero_hyperbolic(P) == (True, None)
    assert hy.delta(P).delta == 0


@given(digraphs(max_n=6))
def test_bound_profile_matches_definition(D):
    d = oracles.distances(D.n, D.edges)
    for direction in ("out", "in"):
        prof = hy.bound_profile(D, direction, 4)
        for r in range(5):
            want = 0
            for x in range(D.n):
                members = [v for v in range(D.n)
                           if (d[x][v] if direction == "out" else d[v][x]) <= r]
                for a in members:
                    for b in members:
                        if d[a][b] != float("inf"):
                            want = max(want, int(d[a][b]))
            assert prof(r) == want
        with pytest.raises(KeyError):
            prof(5)


def test_named_constants_on_small_values():
    t = hy.named_constants(1, [0, 2, 3])
    assert t.divergence_k == 6 + 2 * 3
    assert t.divergence_e0 == (2 + 1 + 1) * 3 + 2 + 1
    assert t.narrow_radius == t.stability_kappa == t.divergence_k
    t2 = hy.named_constants(1, [0, 2, 3], base=Fraction(3, 2))
    assert t2.epsilon_prime == Fraction(3, 2) ** 24


@given(st.integers(0, 200), st.integers(0, 12), st.integers(0, 3), st.integers(0, 6))
def test_divergence_bound_exact_matches_float(length, r, d, k):
    exact = hy.exceeds_divergence_bound(length, r, d, k)
    e = hy.divergence_e(r, d, k)
    if k == 0:
        assert exact == (r - 2 * d - 1 <= 0)
        return
    if not math.isclose(length, e, rel_tol=1e-12, abs_tol=1e-9):
        assert exact == (length > e)


def test_verify_bounds_on_tree_is_clean():
    T = Digraph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    f = hy.bound_profile(T, "out", 4)
    rep = hy.verify_bounds_all(T, 0, f)
    assert rep.ok and rep.triangles > 0
    tri = hy.GeodesicTriangle((0, 1, 3), (walks_through([0, 1]), walks_through([1, 3]),
                                          walks_through([0, 1, 3])), 4)
    assert hy.verify_bounds(T, tri, 0, f).ok


def test_verify_bounds_rejects_fractional_epsilon():
    T = Digraph(2, [(0, 1)])
    with pytest.raises(ValueError, match="epsilon"):
        hy.verify_bounds_all(T, 0, [0, 1, 1], epsilon=Fraction(1, 2))


_BACKEND_SCRIPT = """
import json, numpy as np
from dirhyp import _kernels, hyperbolicity as hy
from dirhyp.criteria import random_digraph
rng = np.random.default_rng(7)
out = {"backend": _kernels.backend_name(), "rows": []}
for _ in range(40):
    D = random_digraph(rng, 7, parallel=True)
    rec = [D.distances.raw.tolist()]
    for kind in ("thin", "slim"):
        for mode in ("all", "transitive"):
            rec.append(hy.delta(D, kind, mode).to_record(D))
    out["rows"].append(rec)
print(json.dumps(out, sort_keys=True))
"""


def _run_backend(disable: bool):
    env = dict(os.environ)
    env["DIRHYP_DISABLE_NUMBA"] = "1" if disable else "0"
    proc = subprocess.run([sys.executable, "-c", _BACKEND_SCRIPT], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def test_numba_and_numpy_backends_agree():
    fast, slow = _run_backend(False), _run_backend(True)
    assert fast["backend"] == "numba" and slow["backend"] == "numpy"
    assert fast["rows"] == slow["rows"]
