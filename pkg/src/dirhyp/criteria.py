"""Acceptance checks AC1-AC13, shared by the test suite and ``dirhyp verify``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import boundary as bd
from . import divergence as dv
from . import hyperbolicity as hy
from . import oracles
from .core import FAR, Digraph, subdivide
from .extnat import INF, to_json
from .families import cayley_ball, realize, rays
from .geodesics import count_geodesics, enumerate_geodesics, is_geodesic
from .rewriting import builtin_presentation

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{self.name}: {'PASS' if self.ok else 'FAIL'}"

    def to_record(self) -> dict:
        return {"criterion": self.name, "ok": self.ok, "detail": self.detail}


def random_digraph(rng: np.random.Generator, n_max: int, parallel: bool = False) -> Digraph:
    n = int(rng.integers(1, n_max + 1))
    p = float(rng.uniform(0.15, 0.6))
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                copies = int(rng.integers(1, 3)) if parallel else 1
                edges.extend([(u, v)] * copies)
    return Digraph(n, edges)


def small_corpus(seed: int = DEFAULT_SEED, count: int = 500) -> list[Digraph]:
    """Seeded random digraphs on at most 6 vertices plus every loopless digraph on at most 3."""
    rng = np.random.default_rng(seed)
    corpus = [random_digraph(rng, 6) for _ in range(count)]
    for n in range(1, 4):
        pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
        for mask in range(1 << len(pairs)):
            corpus.append(Digraph(n, [p for i, p in enumerate(pairs) if mask >> i & 1]))
    return corpus


def cycle(n: int) -> Digraph:
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


# ---------------------------------------------------------------------------


def ac1(seed: int = DEFAULT_SEED) -> CriterionResult:
    corpus = small_corpus(seed)
    offenders = []
    zero_count = 0
    for D in corpus:
        zero, _ = hy.is_zero_hyperbolic(D)
        if zero:
            zero_count += 1
            res = hy.delta(D)
            if res.delta != 0 or not res.exhaustive:
                offenders.append([list(e) for e in D.edges])
    C3 = cycle(3)
    edge_triangle = hy.GeodesicTriangle(
        (0, 1, 2), tuple(hy.DirectedWalk(p) for p in ((0, 1), (1, 2), (2, 0))), 0)
    edge_defect = hy.triangle_defect(C3, edge_triangle)
    c3_zero, _ = hy.is_zero_hyperbolic(C3)
    sub = hy.delta(subdivide(C3, 2)).delta
    ok = not offenders and edge_defect == 0 and not c3_zero and sub >= 1
    return CriterionResult("AC1", ok, {
        "corpus": len(corpus), "zero_hyperbolic": zero_count, "offenders": offenders[:5],
        "cycle3_edge_triangle_defect": edge_defect, "cycle3_zero_hyperbolic": c3_zero,
        "cycle3_delta_all": to_json(hy.delta(C3).delta),
        "subdivided_cycle3_delta": to_json(sub)})


def ac2(seed: int = DEFAULT_SEED) -> CriterionResult:
    offenders = []
    corpus = small_corpus(seed)
    for D in corpus:
        da = hy.delta(D, mode="all")
        dt = hy.delta(D, mode="transitive")
        if not (da.exhaustive and dt.exhaustive and dt.delta <= da.delta <= 3 * dt.delta):
            offenders.append({"edges": [list(e) for e in D.edges],
                              "all": to_json(da.delta), "transitive": to_json(dt.delta)})
    return CriterionResult("AC2", not offenders,
                           {"corpus": len(corpus), "offenders": offenders[:5]})


def ac3() -> CriterionResult:
    rows = []
    ok = True
    for n in range(2, 7):
        D = realize("ex7_4", n + 3).digraph
        t = (D.index(f"x{n}"), D.index(f"x{n + 1}"), D.index(f"y{n + 1}"))
        res = hy.delta_on_triples(D, [t])
        passed = 2 * res.delta > n - 2
        ok &= passed and res.exhaustive
        rows.append({"n": n, "defect": to_json(res.delta),
                     "threshold": to_json(Fraction(n, 2) - 1), "passed": passed})
    return CriterionResult("AC3", ok, {"rows": rows})


def ex6_2_defects(n: int = 10, i_range=range(2, 9), refine: int = 2):
    """Defects of triangles (x0, xi, yi), at vertex level and on the refinement.

    Refined values are divided by the subdivision factor, so both sequences
    are in units of original edges.
    """
    D = realize("ex6_2", n).digraph
    S = subdivide(D, refine)
    vertex, refined = [], []
    for i in i_range:
        t = (D.index("x0"), D.index(f"x{i}"), D.index(f"y{i}"))
        vertex.append(hy.delta_on_triples(D, [t]).delta)
        refined.append(Fraction(hy.delta_on_triples(S, [t]).delta, refine))
    return vertex, refined


def ac4() -> CriterionResult:
    vertex, refined = ex6_2_defects()
    strict = all(a < b for a, b in zip(refined, refined[1:]))
    m = 10
    D = realize("ex6_2", m).digraph
    P1 = hy.DirectedWalk(tuple(D.index(f"x{i}") for i in range(m + 1)))
    P2 = hy.DirectedWalk((D.index("x0"),) + tuple(D.index(f"y{i}") for i in range(1, m + 1)))
    x0 = D.index("x0")
    gaps = []
    for R in range(m + 1):
        cfg = dv.DivergenceConfig(x0, P1, P2, R, 0)
        cfg.validate(D)
        gap, _ = dv.divergence_witness(D, cfg)
        gaps.append(gap)
    gaps_ok = all(g <= 2 for g in gaps)
    return CriterionResult("AC4", strict and gaps_ok, {
        "granularity": "edge midpoints (subdivision factor 2), in original edge units",
        "refined_defects": [to_json(v) for v in refined],
        "vertex_level_defects": [to_json(v) for v in vertex],
        "vertex_level_strict": all(a < b for a, b in zip(vertex, vertex[1:])),
        "gaps": [to_json(g) for g in gaps]})


AC5_CASES = (("nat_line", 8), ("int_line", 6), ("ex13_4_tree", 6), ("ex16_5", 6))


def ac5(cases=AC5_CASES) -> CriterionResult:
    rows = []
    ok = True
    for fam, n in cases:
        D = realize(fam, n).digraph
        d = hy.delta(D).delta
        f = hy.bound_profile(D, "out", int(d) + 2)
        consts = hy.named_constants(d, f)
        scan = dv.scan_divergence(D, d, consts.divergence_e0, consts.divergence_k)
        ok &= scan.ok
        rows.append({"family": fam, "n": n, **scan.to_record(D)})
    return CriterionResult("AC5", ok, {"rows": rows})


def ac6() -> CriterionResult:
    rows = []
    ok = True
    for fam, radii in (("ex16_5", range(1, 7)), ("free_monoid", range(1, 7))):
        d = hy.delta(realize(fam, 6).digraph).delta
        for n in radii:
            D = realize(fam, n).digraph
            rho = D.max_degree()
            for direction in ("out", "in"):
                prof = hy.bound_profile(D, direction, 6)
                for r in range(7):
                    bound = hy.ball_diameter_bound(r, d, rho)
                    if prof(r) is INF or prof(r) > bound:
                        ok = False
                        rows.append({"family": fam, "n": n, "direction": direction, "r": r,
                                     "value": to_json(prof(r)), "bound": bound})
    return CriterionResult("AC6", ok, {"violations": rows})


def ac7() -> CriterionResult:
    rows = []
    ok = True
    for fam, n in (("ex13_4_tree", 5), ("ex16_5", 5)):
        D = realize(fam, n).digraph
        d = hy.delta(D).delta
        f = hy.bound_profile(D, "out", int(d) + 2)
        g = hy.bound_profile(D, "in", int(d) + 2)
        rep = hy.verify_bounds_all(D, d, f, g, epsilon=1)
        ok &= rep.ok
        rows.append({"family": fam, "n": n, "delta": to_json(d), **rep.to_record(D)})
    return CriterionResult("AC7", ok, {"rows": rows})


def random_rho_eps(rng: np.random.Generator, size: int, epsilon_prime: Fraction
                   ) -> list[list[Fraction]]:
    """A matrix with zero diagonal, entries in (0, 1], meeting the three-point bound.

    One uniformly random candidate is tried first.  Otherwise entries come
    from a random ultrametric times jitter in [1, eps'].  Every candidate is
    checked and rejected on failure.
    """
    w = [[Fraction(0) if i == j else Fraction(int(rng.integers(60, 101)), 100)
          for j in range(size)] for i in range(size)]
    if not bd.three_point_failures(w, epsilon_prime):
        return w
    while True:
        levels = [[Fraction(0)] * size for _ in range(size)]
        groups = [[i] for i in range(size)]
        height = Fraction(0)
        while len(groups) > 1:
            height += Fraction(int(rng.integers(1, 40)), 100)
            a, b = sorted(rng.choice(len(groups), 2, replace=False))
            for i in groups[a]:
                for j in groups[b]:
                    levels[i][j] = levels[j][i] = height
            groups[a] = groups[a] + groups[b]
            del groups[b]
        top = max((v for row in levels for v in row), default=Fraction(1)) or Fraction(1)
        scale = 1 / (top * epsilon_prime)
        w = [[Fraction(0) if i == j else levels[i][j] * scale *
              (1 + (epsilon_prime - 1) * Fraction(int(rng.integers(0, 101)), 100))
              for j in range(size)] for i in range(size)]
        if not bd.three_point_failures(w, epsilon_prime):
            return w


def ac8(seed: int = DEFAULT_SEED, count: int = 200) -> CriterionResult:
    rng = np.random.default_rng(seed)
    fails = []
    for t in range(count):
        size = int(rng.integers(1, 9))
        ep = Fraction(int(rng.integers(101, 142)), 100)
        w = random_rho_eps(rng, size, ep)
        rep = bd.verify_chain_inequality(w, ep)
        if not rep.ok:
            fails.append({"trial": t, "size": size, "epsilon_prime": to_json(ep),
                          **rep.to_record()})
    return CriterionResult("AC8", not fails, {"matrices": count, "failures": fails[:5]})


def ac9() -> CriterionResult:
    bp = bd.boundary_partition("ex12_2", 20, 4)
    ends = bd.ends_partition("ex12_2", 20)
    ref = bd.refinement_map("ex12_2", 20, 4)
    eta_mu = bp.profiles[("v-ray", "x-anti-ray")]
    ok = (len(bp.classes) == 2 and not bp.provisional
          and bp.accepted[("v-ray", "x-anti-ray")] == bd.CERTIFIED
          and set(eta_mu.values.values()) == {2}
          and bp.accepted[("x-anti-ray", "v-ray")] == bd.REFUTED
          and len(ends.classes) == 2 and ref.ok)
    return CriterionResult("AC9", ok, {"boundary": bp.to_record(), "ends": ends.to_record(),
                                       "refinement": ref.to_record()})


def ac10() -> CriterionResult:
    R = rays("ex14_2")
    names = [r.name for r in R]
    mats = [bd.rho_matrix("ex14_2", ["x0"], R, w, n=20) for w in ((5, 10), (10, 20))]
    om, et, mu = (names.index(s) for s in ("x-ray", "y-anti-ray", "z-anti-ray"))
    grow = all(mats[0].rho[om][j] < mats[1].rho[om][j] for j in (et, mu))
    bounded = all(m.rho[a][b] is not INF for m in mats for a, b in ((et, mu), (mu, et)))
    steady = all(mats[0].rho[a][b] == mats[1].rho[a][b] for a, b in ((et, mu), (mu, et)))
    bp = bd.boundary_partition("ex14_2", 20, 4)
    distinct = bp.class_of("y-anti-ray") != bp.class_of("z-anti-ray")
    return CriterionResult("AC10", grow and bounded and steady and distinct, {
        "windows": [m.to_record() for m in mats], "eta_mu_distinct": distinct})


def ac11_qi_digraphs(radius: int = 6):
    """The {a,b} ball and the {a,b,ab} Cayley digraph on the same elements."""
    p = builtin_presentation("ex16_5")
    D1 = cayley_ball(p, ["a", "b"], radius).digraph
    big = cayley_ball(p, ["a", "b", "ab"], radius).digraph
    keep = [big.index(lab) for lab in D1.labels]
    D2, _ = big.induced(keep)
    return D1, D2


def ac11() -> CriterionResult:
    detail = {}
    infinite = []
    for n in range(2, 7):
        D = realize("ex16_5", n).digraph
        a, b = D.index("a"), D.index("b")
        infinite.append(D.distances[a, b] is INF and D.distances[b, a] is INF)
    sizes = [(n, realize("ex16_5", n).digraph.n, oracles.semigroup_words_ball(n))
             for n in range(0 + 1, 7)]
    deltas = [hy.delta(realize("ex16_5", n).digraph).delta for n in (4, 5, 6)]
    D1, D2 = ac11_qi_digraphs(6)
    identity = list(range(D1.n))
    grid = [1, Fraction(3, 2), 2]
    best, passing = dv.qi_minimal(identity, D1, D2, grid, [0, 1, 2])
    oracle_ok = best is not None and oracles.qi_holds(
        oracles.distances(D1.n, D1.edges), oracles.distances(D2.n, D2.edges), identity, *best)
    ok = (all(infinite) and all(s == o for _, s, o in sizes) and len(set(deltas)) == 1
          and best is not None and oracle_ok)
    detail.update({"a_b_infinite": infinite,
                   "ball_sizes": [{"n": n, "size": s, "oracle": o} for n, s, o in sizes],
                   "delta_at_4_5_6": [to_json(v) for v in deltas],
                   "qi_least": [to_json(v) for v in best] if best else None,
                   "qi_passing": [[to_json(g), to_json(c)] for g, c in passing]})
    return CriterionResult("AC11", ok, detail)


def ac12(seed: int = DEFAULT_SEED, count: int = 500) -> CriterionResult:
    rng = np.random.default_rng(seed + 12)
    bad = []
    pairs = 0
    for _ in range(count):
        D = random_digraph(rng, 7, parallel=True)
        raw = D.distances.raw
        for x in range(D.n):
            for y in range(D.n):
                if raw[x, y] >= FAR:
                    continue
                pairs += 1
                c = count_geodesics(D, x, y)
                summ = enumerate_geodesics(D, x, y, cap=10 ** 6)
                if c != len(summ.sample) or summ.truncated or \
                        not all(is_geodesic(D, w) for w in summ.sample):
                    bad.append({"edges": [list(e) for e in D.edges], "x": x, "y": y,
                                "count": c, "enumerated": len(summ.sample)})
    return CriterionResult("AC12", not bad, {"pairs": pairs, "offenders": bad[:5]})


def ac13() -> CriterionResult:
    diamond = Digraph(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    rep = dv.stability_defect(diamond, 0, 3, 1, 0)
    ok = rep.kappa_out == 1 and rep.kappa_in == 1
    worst = 0
    for n in range(1, 6):
        D = realize("ex7_4", n).digraph
        raw = D.distances.raw
        for x in range(D.n):
            for y in range(D.n):
                if raw[x, y] >= FAR:
                    continue
                r = dv.stability_defect(D, x, y, 2, 1)
                worst = max(worst, r.kappa_out, r.kappa_in)
                ok &= r.exhaustive
    ok &= worst <= 3
    return CriterionResult("AC13", ok, {"diamond": rep.to_record(diamond),
                                        "ex7_4_worst_kappa": to_json(worst)})


CRITERIA: dict[str, Callable[[], CriterionResult]] = {
    "AC1": ac1, "AC2": ac2, "AC3": ac3, "AC4": ac4, "AC5": ac5, "AC6": ac6, "AC7": ac7,
    "AC8": ac8, "AC9": ac9, "AC10": ac10, "AC11": ac11, "AC12": ac12, "AC13": ac13,
}


SEEDED = {"AC1", "AC2", "AC8", "AC12"}


def run(names=None, seed: int = DEFAULT_SEED) -> list[CriterionResult]:
    names = list(CRITERIA) if not names else names
    out = []
    for name in names:
        key = name.upper()
        if key not in CRITERIA:
            raise KeyError(f"unknown criterion {name!r}; choose from {', '.join(CRITERIA)}")
        out.append(CRITERIA[key](seed) if key in SEEDED else CRITERIA[key]())
    return out
