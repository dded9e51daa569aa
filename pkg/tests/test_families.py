from itertools import product

import pytest
from hypothesis import given
import hypothesis.strategies as st

from dirhyp import oracles
from dirhyp.core import Digraph
from dirhyp.extnat import INF
from dirhyp.families import (CATALOG, FamilySpec, cayley_ball, family_info, list_families,
                             rays, realize)
from dirhyp.rewriting import (RewriteBudgetExceeded, builtin_presentation,
                              parse_presentation)

RAY_FAMILIES = ["nat_line", "int_line", "ex6_2", "ex7_4", "ex12_2", "ex13_4_tree", "ex14_2",
                "ex16_5", "free_monoid"]


def _label_distances(real):
    D = real.digraph
    return {(D.labels[u], D.labels[v]): D.distances[u, v]
            for u in range(D.n) for v in range(D.n)}


@pytest.mark.parametrize("name", RAY_FAMILIES)
def test_stable_core_distances_do_not_change(name):
    n = 4 if name == "ex13_4_tree" else 5
    small, big = realize(name, n), realize(name, n + 3)
    core = realize(name, small.stable_core).labels if small.stable_core else ()
    ds, db = _label_distances(small), _label_distances(big)
    for a in core:
        for b in core:
            assert ds[(a, b)] == db[(a, b)], (a, b)


@pytest.mark.parametrize("name", RAY_FAMILIES)
def test_rays_follow_arcs(name):
    real = realize(name, 8 if name != "ex13_4_tree" else 5)
    D = real.digraph
    for R in rays(name):
        idx = R.indices(real)
        assert len(idx) >= 3, R.name
        walk = R.segment(real, 0, len(idx) - 1)
        for u, v in zip(walk, walk[1:]):
            assert v in D.successors(u), (R.name, D.labels[u], D.labels[v])
        if R.geodesic:
            assert D.distances[walk[0], walk[-1]] == len(walk) - 1


@pytest.mark.parametrize("r", range(1, 7))
def test_ex16_5_ball_sizes(r):
    assert realize("ex16_5", r).digraph.n == oracles.semigroup_words_ball(r)


@pytest.mark.parametrize("k, r", [(1, 4), (2, 3), (3, 3)])
def test_free_monoid_is_a_tree(k, r):
    D = realize(FamilySpec("free_monoid", {"k": k}), r).digraph
    assert D.n == sum(k ** i for i in range(r + 1))
    assert len(D.edges) == D.n - 1


def test_cayley_table_default_is_a_three_cycle():
    D = realize("cayley_table", 3).digraph
    assert D == Digraph(3, [(0, 1), (1, 2), (2, 0)], D.labels)


def test_catalog_metadata():
    names = list_families()
    assert set(names) == set(CATALOG)
    assert family_info("ex13_4_tree").finitely_based is False
    assert family_info("ex14_2").finitely_based is True
    with pytest.raises(ValueError):
        realize("nat_line", 0)


EX16_5 = builtin_presentation("ex16_5")


def _words(alphabet, max_len):
    for L in range(max_len + 1):
        yield from product(range(len(alphabet)), repeat=L)


def test_ex16_5_normal_forms_are_classified_by_invariants():
    seen = {}
    for w in _words("ab", 6):
        nf = EX16_5.normal_form(w)
        key = (len(w), sum(1 for s in w if s == 1) % 2)
        assert seen.setdefault(key, nf) == nf
        text = EX16_5.show(nf)
        assert text == "1" or text.rstrip("b").strip("a") == "" and text.count("b") <= 1


@given(st.lists(st.integers(0, 1), max_size=8), st.lists(st.integers(0, 1), max_size=8))
def test_multiplication_is_associative_on_normal_forms(x, y):
    p = builtin_presentation("bicyclic")
    z = (1, 0)
    assert p.multiply(p.multiply(tuple(x), tuple(y)), z) == \
        p.multiply(tuple(x), p.multiply(tuple(y), z))
    nf = p.normal_form(tuple(x))
    assert p.normal_form(nf) == nf


def test_bicyclic_normal_form_shape():
    p = builtin_presentation("bicyclic")
    for w in _words("pq", 6):
        text = p.show(p.normal_form(w))
        assert "pq" not in text


def test_rewrite_budget():
    p = parse_presentation("a\na -> aa\n")
    with pytest.raises(RewriteBudgetExceeded):
        p.normal_form((0,), budget=50)


@pytest.mark.parametrize("text, line", [
    ("a b\nab\n", 2),
    ("a b\nc -> a\n", 2),
    ("a b\n1 -> a\n", 2),
    ("a b\nkind\n", 2),
])
def test_presentation_parse_errors(text, line):
    with pytest.raises(ValueError, match=f"line {line}"):
        parse_presentation(text)


def test_semigroup_ball_starts_at_generators():
    p = parse_presentation("a\nkind semigroup\n")
    real = cayley_ball(p, None, 3)
    assert real.labels == ("a", "aa", "aaa")
    assert real.digraph.distances[0, 2] == 2 and real.digraph.distances[2, 0] == INF
