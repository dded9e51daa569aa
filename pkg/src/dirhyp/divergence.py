"""Divergence of geodesics, geodesic stability, and quasi-isometry checks."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import FAR, Digraph, ball_mask
from .extnat import INF, to_json
from .geodesics import (DEFAULT_CAP, DirectedWalk, geodesic_paths, is_geodesic,
                        is_quasi_geodesic, simple_walks)
from .hyperbolicity import GeodesicStore, exceeds_divergence_bound


def point_at(D: Digraph, P: DirectedWalk, x: int, R: int) -> int:
    """The point of geodesic P at distance R from x (x is P's first or last vertex)."""
    if R < 0 or R > len(P):
        raise ValueError(f"R = {R} exceeds the geodesic length {len(P)}")
    if P.start == x:
        return P.vertices[R]
    if P.end == x:
        return P.vertices[len(P) - R]
    raise ValueError(f"vertex {x} is not an endpoint of the geodesic")


@dataclass
class DivergenceConfig:
    x: int
    P1: DirectedWalk
    P2: DirectedWalk
    R: int
    r: int

    def validate(self, D: Digraph) -> None:
        for P in (self.P1, self.P2):
            if not is_geodesic(D, P):
                raise ValueError(f"{P} is not a geodesic")
            if self.x not in (P.start, P.end):
                raise ValueError(f"{P} neither starts nor ends at {self.x}")
        if self.R > len(self.P1):
            raise ValueError("marked point does not exist: R exceeds the length of P1")


def shortest_avoiding_path(D: Digraph, sources: Iterable[int], targets: Iterable[int],
                           forbidden: np.ndarray, max_len: int | None = None
                           ) -> DirectedWalk | None:
    """Shortest walk from any source to any target through allowed vertices only."""
    targets = {t for t in targets if not forbidden[t]}
    prev: dict[int, int] = {}
    queue: deque[tuple[int, int]] = deque()
    for s in sorted(set(sources)):
        if forbidden[s] or s in prev:
            continue
        prev[s] = -1
        queue.append((s, 0))
    while queue:
        u, du = queue.popleft()
        if u in targets:
            path = [u]
            while prev[path[-1]] != -1:
                path.append(prev[path[-1]])
            return DirectedWalk(tuple(reversed(path)))
        if max_len is not None and du >= max_len:
            continue
        for v in D.successors(u):
            if not forbidden[v] and v not in prev:
                prev[v] = u
                queue.append((v, du + 1))
    return None


def _avoid_distances(D: Digraph, sources: Sequence[int], forbidden: np.ndarray) -> np.ndarray:
    dist = np.full(D.n, FAR, dtype=np.int64)
    queue: deque[int] = deque()
    for s in sources:
        if not forbidden[s] and dist[s] == FAR:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        for v in D.successors(u):
            if not forbidden[v] and dist[v] == FAR:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def divergence_witness(D: Digraph, cfg: DivergenceConfig, symmetric: bool = False):
    """(gap, escaping path or None) for one configuration.

    ``gap`` is the directed distance from the marked point of P1 to P2 (or the
    symmetric-min distance when ``symmetric``).  The path is a shortest walk
    from P1 to P2 outside the out- and in-balls of radius R + r around x.
    """
    raw = D.distances.raw
    u = point_at(D, cfg.P1, cfg.x, cfg.R)
    q = np.asarray(cfg.P2.vertices)
    gap = int(raw[u, q].min())
    if symmetric:
        gap = min(gap, int(raw[q, u].min()))
    forbidden = ball_mask(D, [cfg.x], cfg.R + cfg.r)
    path = shortest_avoiding_path(D, cfg.P1.vertices, cfg.P2.vertices, forbidden)
    return (INF if gap >= FAR else gap), path


def empirical_divergence(D: Digraph, configs: Iterable[DivergenceConfig], r_grid,
                         threshold=0) -> dict:
    """Per r: the shortest escaping path over configs whose gap exceeds threshold.

    The envelope is made monotone by taking running minima from the top.
    """
    best = {r: INF for r in r_grid}
    for cfg in configs:
        for r in r_grid:
            c = DivergenceConfig(cfg.x, cfg.P1, cfg.P2, cfg.R, r)
            gap, path = divergence_witness(D, c)
            if gap > threshold and path is not None and len(path) < best[r]:
                best[r] = len(path)
    rs = sorted(best)
    running = INF
    for r in reversed(rs):
        running = min(running, best[r])
        best[r] = running
    return best


@dataclass
class DivergenceScan:
    """Outcome of checking a candidate divergence function on every configuration."""

    e0: Fraction
    delta: int
    k: Fraction
    configs: int = 0
    premise_fired: int = 0
    envelope: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_record(self, D: Digraph | None = None) -> dict:
        lab = (lambda v: D.labels[v]) if D is not None else (lambda v: v)
        return {
            "ok": self.ok,
            "e0": to_json(self.e0),
            "delta": self.delta,
            "k": to_json(self.k),
            "configs": self.configs,
            "premise_fired": self.premise_fired,
            "envelope": {str(r): to_json(v) for r, v in sorted(self.envelope.items())},
            "violations": [
                {"x": lab(x), "R": R, "r": r, "length": L,
                 "path": [lab(v) for v in path]}
                for (x, R, r, L, path) in self.violations[:20]
            ],
        }


def scan_divergence(D: Digraph, delta_value: int, e0, k, r_grid=range(0, 7),
                    cap: int = DEFAULT_CAP, store: GeodesicStore | None = None,
                    max_violations: int = 50) -> DivergenceScan:
    """Test e(r) = 2^((r - 2 delta - 1)/k) - 1 against every escaping path.

    Configurations range over all x, all geodesics P1, P2 with x as first or
    last vertex, and all R <= len(P1).  Only configurations whose premise
    ``d(P1^x(R), P2) > e0`` holds are searched for escaping paths.
    """
    if store is None:
        store = GeodesicStore(D, cap=cap)
    raw = D.distances.raw
    e0 = Fraction(e0)
    scan = DivergenceScan(e0, int(delta_value), Fraction(k))
    envelope = {r: INF for r in r_grid}
    geo_of = _geodesics_at(D, store)
    masks: dict[tuple[int, int], np.ndarray] = {}
    reach: dict[tuple, np.ndarray] = {}
    for x in range(D.n):
        gids = geo_of[x]
        if not gids:
            continue
        gids_arr = np.asarray(gids, dtype=np.int64)
        for g1 in gids:
            P1 = store.walk(g1)
            p1 = np.asarray(P1.vertices)
            for R in range(len(P1) + 1):
                u = point_at(D, P1, x, R)
                gaps = store.inv[gids_arr, u].astype(np.int64)
                scan.configs += len(gids)
                fired = gids_arr[gaps > e0]
                if len(fired) == 0:
                    continue
                scan.premise_fired += len(fired)
                for r in r_grid:
                    rad = R + r
                    forbidden = masks.get((x, rad))
                    if forbidden is None:
                        forbidden = masks[(x, rad)] = ball_mask(D, [x], rad)
                    sources = p1[~forbidden[p1]]
                    if len(sources) == 0:
                        continue
                    key = (x, rad, sources.tobytes())
                    dv = reach.get(key)
                    if dv is None:
                        dv = reach[key] = _avoid_distances(D, sources.tolist(), forbidden)
                    for g2 in fired:
                        s = int(store.geo_start[g2])
                        verts = store.geo_verts[s:s + int(store.geo_len[g2])]
                        verts = verts[~forbidden[verts]]
                        if len(verts) == 0:
                            continue
                        L = int(dv[verts].min())
                        if L >= FAR:
                            continue
                        if L < envelope[r]:
                            envelope[r] = L
                        if not exceeds_divergence_bound(L, r, delta_value, k):
                            if len(scan.violations) < max_violations:
                                path = shortest_avoiding_path(D, sources.tolist(),
                                                              verts.tolist(), forbidden)
                                scan.violations.append((x, R, r, L, path.vertices))
    scan.envelope = envelope
    return scan


def _geodesics_at(D: Digraph, store: GeodesicStore) -> list[list[int]]:
    """For every vertex x, ids of stored geodesics starting or ending at x."""
    out: list[list[int]] = [[] for _ in range(D.n)]
    for g in range(len(store.geo_start)):
        s = int(store.geo_start[g])
        a = int(store.geo_verts[s])
        b = int(store.geo_verts[s + int(store.geo_len[g]) - 1])
        out[a].append(g)
        if b != a:
            out[b].append(g)
    return out


# ---------------------------------------------------------------------------
# geodesic stability


@dataclass
class StabilityReport:
    kappa_out: object
    kappa_in: object
    pairs_examined: int
    exhaustive: bool
    candidates: int = 0
    witness_out: tuple | None = None
    witness_in: tuple | None = None

    def to_record(self, D: Digraph | None = None) -> dict:
        lab = (lambda v: D.labels[v]) if D is not None else (lambda v: v)

        def wit(w):
            if w is None:
                return None
            a, b, p = w
            return {"from_walk": [lab(v) for v in a], "to_walk": [lab(v) for v in b],
                    "point": lab(p)}

        return {"kappa_out": to_json(self.kappa_out), "kappa_in": to_json(self.kappa_in),
                "pairs_examined": self.pairs_examined, "exhaustive": self.exhaustive,
                "candidates": self.candidates, "witness_out": wit(self.witness_out),
                "witness_in": wit(self.witness_in)}


def stability_candidates(D: Digraph, x: int, y: int, gamma, c, cap: int = DEFAULT_CAP,
                         simple_only: bool = True):
    """Geodesics plus (gamma, c)-quasi-geodesic x-y walks within the length bound."""
    raw = D.distances.raw
    d = int(raw[x, y])
    if d >= FAR:
        raise ValueError(f"unreachable: no directed path from {x} to {y}")
    bound = Fraction(gamma) * d + Fraction(c)
    max_len = int(bound)  # floor
    geos, trunc_g = geodesic_paths(D, x, y, cap)
    if simple_only:
        walks, trunc_w = simple_walks(D, x, y, max_len, cap)
    else:
        walks, trunc_w = _bounded_walks(D, x, y, max_len, cap)
    seen = set()
    cands = []
    for w in list(geos) + list(walks):
        if w in seen:
            continue
        if w not in geos and not is_quasi_geodesic(D, DirectedWalk(w), gamma, c):
            continue
        seen.add(w)
        cands.append(w)
    return cands, not (trunc_g or trunc_w)


def _bounded_walks(D: Digraph, x: int, y: int, max_len: int, cap: int):
    raw = D.distances.raw
    out = []
    path = [x]

    def rec():
        if len(out) > cap:
            return
        u = path[-1]
        if u == y:
            out.append(tuple(path))
        for v in D.successors(u):
            if len(path) + int(min(raw[v, y], FAR)) <= max_len:
                path.append(v)
                rec()
                path.pop()

    rec()
    return out[:cap], len(out) > cap


def stability_defect(D: Digraph, x: int, y: int, gamma=1, c=0, cap: int = DEFAULT_CAP,
                     simple_only: bool = True) -> StabilityReport:
    """Largest distance from and to one candidate x-y walk from a point of another."""
    cands, exhaustive = stability_candidates(D, x, y, gamma, c, cap, simple_only)
    raw = D.distances.raw
    kout = kin = 0
    wout = win = None
    for b in cands:
        bv = np.asarray(b)
        from_b = raw[bv, :].min(axis=0)
        to_b = raw[:, bv].min(axis=1)
        for a in cands:
            av = np.asarray(a)
            fo = from_b[av]
            ti = to_b[av]
            i = int(fo.argmax())
            if fo[i] > kout:
                kout = int(fo[i])
                wout = (a, b, a[i])
            j = int(ti.argmax())
            if ti[j] > kin:
                kin = int(ti[j])
                win = (a, b, a[j])
    n = len(cands)
    return StabilityReport(INF if kout >= FAR else kout, INF if kin >= FAR else kin,
                           n * n, exhaustive, n, wout, win)


# ---------------------------------------------------------------------------
# quasi-isometry


@dataclass
class QIResult:
    ok: bool
    violations: list

    def to_record(self) -> dict:
        return {"ok": self.ok, "violations": self.violations[:50],
                "violation_count": len(self.violations)}


def qi_check(mapping: Sequence[int] | Mapping[int, int], D1: Digraph, D2: Digraph,
             gamma=1, c=0) -> QIResult:
    """Check the two-sided distance inequalities and co-density, listing every failure."""
    f = np.asarray([mapping[i] for i in range(D1.n)], dtype=np.int64)
    g = Fraction(gamma)
    cc = Fraction(c)
    d1 = D1.distances.raw
    d2 = D2.distances.raw[np.ix_(f, f)]
    inf1 = d1 >= FAR
    inf2 = d2 >= FAR
    gp, gq = g.numerator, g.denominator
    cp, cq = cc.numerator, cc.denominator
    a1 = np.where(inf1, 0, d1).astype(object)
    a2 = np.where(inf2, 0, d2).astype(object)
    # lower: d1 / g - c <= d2   <=>  d1 * gq * cq <= gp * (d2 * cq + cp)
    lower_bad = ~inf1 & ~inf2 & (a1 * gq * cq > gp * (a2 * cq + cp))
    # upper: d2 <= g d1 + c     <=>  d2 * gq * cq <= gp * cq * d1 + cp * gq
    upper_bad = ~inf1 & ~inf2 & (a2 * gq * cq > gp * cq * a1 + cp * gq)
    lost = ~inf1 & inf2      # finite distance sent to infinity
    created = inf1 & ~inf2   # infinite distance sent to a finite one
    violations = []
    for kind, mask in (("lower", lower_bad), ("upper", upper_bad),
                       ("upper-infinite", lost), ("lower-infinite", created)):
        for x, y in zip(*np.nonzero(mask)):
            violations.append({"kind": kind, "pair": [D1.labels[x], D1.labels[y]],
                               "d1": to_json(INF if inf1[x, y] else int(d1[x, y])),
                               "d2": to_json(INF if inf2[x, y] else int(d2[x, y]))})
    full2 = D2.distances.raw
    image = np.unique(f)
    reach = (full2[image, :] * cq <= cp) & (full2[:, image].T * cq <= cp)
    covered = reach.any(axis=0)
    for y in np.flatnonzero(~covered):
        violations.append({"kind": "co-density", "vertex": D2.labels[y]})
    return QIResult(not violations, violations)


def qi_minimal(mapping, D1: Digraph, D2: Digraph, gammas: Iterable, cs: Iterable):
    """All (gamma, c) on the grid that pass, plus the lexicographically least one."""
    passing = []
    for gmm in sorted(Fraction(v) for v in gammas):
        for c in sorted(Fraction(v) for v in cs):
            if qi_check(mapping, D1, D2, gmm, c).ok:
                passing.append((gmm, c))
    return (passing[0] if passing else None), passing
