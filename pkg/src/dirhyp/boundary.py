"""Rays at truncation scale: the quasiorder, boundary classes, ends, and visual distances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .core import FAR, Digraph, ball_mask, scc
from .divergence import shortest_avoiding_path
from .extnat import INF, to_json
from .families import (BallRealization, FamilySpec, RaySpec, family_info, rays,
                       realize)
from .geodesics import DirectedWalk, geodesic_paths

CERTIFIED = "certified-at-scale"
INCONCLUSIVE = "inconclusive"
REFUTED = "refuted"

DEFAULT_R_PROBE = tuple(range(5))


def _real(f, n) -> BallRealization:
    if isinstance(f, BallRealization):
        return f
    return realize(f, n)


def _ray_by_name(f, name) -> RaySpec:
    if isinstance(name, RaySpec):
        return name
    for R in rays(f):
        if R.name == name or R.symbol == name:
            return R
    raise KeyError(f"family has no ray named {name!r}")


def _core_labels(f, real: BallRealization) -> frozenset:
    """Labels whose neighbourhood the truncation already shows faithfully."""
    if real.stable_core >= real.radius:
        return frozenset(real.labels)
    if real.stable_core < 1:
        return frozenset()
    return frozenset(realize(f, real.stable_core).labels)


def _probe_vertices(f, real: BallRealization, r: int, probes=None) -> list[int]:
    """Base points: all vertices of the truncation at r + 2, matched by label."""
    D = real.digraph
    if probes is None:
        labels = realize(f, max(1, r + 2)).labels
    else:
        labels = probes
    return [D.index(lab) for lab in labels if D.has_label(lab)]


# ---------------------------------------------------------------------------
# the quasiorder


@dataclass
class LeqWitness:
    M: int
    r: int
    path: DirectedWalk
    source_index: int
    target_index: int
    probe: str = ""

    def to_record(self, D: Digraph) -> dict:
        return {"M": self.M, "r": self.r, "probe": self.probe,
                "path": self.path.labelled(D),
                "source_index": self.source_index, "target_index": self.target_index}


@dataclass
class LeqResult:
    status: str
    witnesses: list
    failed_probe: str | None = None

    @property
    def witness(self) -> LeqWitness | None:
        if self.status != CERTIFIED or not self.witnesses:
            return None
        return max(self.witnesses, key=lambda w: w.M)


def _positions(real: BallRealization, R: RaySpec) -> dict[int, int]:
    """vertex -> position for the part of R inside the truncation."""
    return {v: i for i, v in enumerate(R.indices(real))}


def _search(f, real, R1, R2, r, probes):
    """Per probe: (probe, shortest witness or None, status).

    Witnesses inside the stable core are preferred.  A probe whose balls
    swallow every truncated vertex of R1 or of R2 is inconclusive, not refuted.
    """
    D = real.digraph
    core = _core_labels(f, real)
    outside_core = np.asarray([lab not in core for lab in D.labels], dtype=bool)
    src = _positions(real, R1)
    dst = _positions(real, R2)
    out = []
    for x in _probe_vertices(f, real, r, probes):
        forbidden = ball_mask(D, [x], r)
        if forbidden[list(src)].all() or forbidden[list(dst)].all():
            out.append((x, None, INCONCLUSIVE))
            continue
        path = shortest_avoiding_path(D, src, dst, forbidden | outside_core)
        status = CERTIFIED
        if path is None:
            path = shortest_avoiding_path(D, src, dst, forbidden)
            status = INCONCLUSIVE
        if path is None:
            out.append((x, None, REFUTED))
            continue
        w = LeqWitness(len(path), r, path, src[path.start], dst[path.end], D.labels[x])
        out.append((x, w, status))
    return out


def ray_leq_witness(f, R1, R2, M: int, r: int, n: int, probes=None) -> LeqResult:
    """Search a directed R1-R2 path of length <= M avoiding both r-balls of every probe.

    ``refuted`` means some probe admits no such path inside the truncation;
    ``inconclusive`` means a witness leaves the stable core.
    """
    real = _real(f, n)
    R1, R2 = _ray_by_name(f, R1), _ray_by_name(f, R2)
    witnesses = []
    status = CERTIFIED
    for x, w, st in _search(f, real, R1, R2, r, probes):
        if w is None and st == INCONCLUSIVE:
            status = INCONCLUSIVE
            continue
        if w is None or w.M > M:
            return LeqResult(REFUTED, witnesses, real.digraph.labels[x])
        witnesses.append(w)
        if st == INCONCLUSIVE:
            status = INCONCLUSIVE
    return LeqResult(status, witnesses)


@dataclass
class MProfile:
    source: str
    target: str
    values: dict
    status: dict
    witnesses: dict

    @property
    def overall(self) -> str:
        sts = set(self.status.values())
        if REFUTED in sts:
            return REFUTED
        if INCONCLUSIVE in sts:
            return INCONCLUSIVE
        return CERTIFIED

    def bound(self):
        return max(self.values.values(), default=0)

    def to_record(self, D: Digraph) -> dict:
        return {"source": self.source, "target": self.target,
                "M": {str(r): to_json(v) for r, v in self.values.items()},
                "status": {str(r): s for r, s in self.status.items()},
                "witnesses": {str(r): (w.to_record(D) if w else None)
                              for r, w in self.witnesses.items()}}


def estimate_M_profile(f, R1, R2, r_grid=DEFAULT_R_PROBE, n: int = 20,
                       probes=None) -> MProfile:
    """Per r, the least M that serves every probe (INF when some probe has no path)."""
    real = _real(f, n)
    R1, R2 = _ray_by_name(f, R1), _ray_by_name(f, R2)
    values, status, wits = {}, {}, {}
    for r in r_grid:
        found = _search(f, real, R1, R2, r, probes)
        if any(st == REFUTED for *_, st in found):
            values[r], status[r], wits[r] = INF, REFUTED, None
            continue
        worst = max((w for _, w, _ in found if w is not None), key=lambda w: w.M, default=None)
        values[r] = worst.M if worst else 0
        status[r] = INCONCLUSIVE if any(s == INCONCLUSIVE for *_, s in found) else CERTIFIED
        wits[r] = worst
    return MProfile(R1.name, R2.name, values, status, wits)


@dataclass
class BoundaryPartition:
    rays: list[str]
    symbols: list[str]
    profiles: dict
    accepted: dict
    classes: list[list[str]]
    order: list[tuple[int, int]]
    provisional: bool
    M_cap: int
    digraph: Digraph

    def class_of(self, ray_name: str) -> int:
        for i, c in enumerate(self.classes):
            if ray_name in c:
                return i
        raise KeyError(ray_name)

    def leq(self, a: str, b: str) -> str:
        return self.accepted[(a, b)]

    def to_record(self) -> dict:
        return {
            "rays": [{"name": r, "symbol": s} for r, s in zip(self.rays, self.symbols)],
            "classes": self.classes,
            "order": [[a, b] for a, b in self.order],
            "provisional": self.provisional,
            "M_cap": self.M_cap,
            "relation": [{"source": a, "target": b, "status": st,
                          "profile": self.profiles[(a, b)].to_record(self.digraph)}
                         for (a, b), st in sorted(self.accepted.items())],
        }


def boundary_partition(f, n: int = 20, M_cap: int = 4, r_probe=DEFAULT_R_PROBE,
                       probes=None) -> BoundaryPartition:
    """Classes of the designated rays under the tested relation and the order between them."""
    real = _real(f, n)
    specs = rays(f)
    if not specs:
        raise ValueError("family has no designated rays")
    names = [R.name for R in specs]
    profiles, accepted = {}, {}
    for R1 in specs:
        for R2 in specs:
            prof = estimate_M_profile(f, R1, R2, r_probe, n, probes)
            profiles[(R1.name, R2.name)] = prof
            st = prof.overall
            if st == CERTIFIED and prof.bound() > M_cap:
                st = REFUTED
            accepted[(R1.name, R2.name)] = st
    edges = [(i, j) for i, a in enumerate(names) for j, b in enumerate(names)
             if i != j and accepted[(a, b)] == CERTIFIED]
    comps = scc(Digraph(len(names), edges))
    classes = [[names[i] for i in c] for c in comps]
    comp_of = {i: k for k, c in enumerate(comps) for i in c}
    order = sorted({(comp_of[i], comp_of[j]) for i, j in edges if comp_of[i] != comp_of[j]})
    provisional = any(st == INCONCLUSIVE for st in accepted.values())
    return BoundaryPartition(names, [R.symbol for R in specs], profiles, accepted, classes,
                             order, provisional, M_cap, real.digraph)


# ---------------------------------------------------------------------------
# ends


def max_vertex_disjoint_paths(D: Digraph, sources: Iterable[int], targets: Iterable[int]) -> int:
    """Maximum number of vertex-disjoint directed paths from one vertex set to another."""
    from scipy.sparse import csr_array
    from scipy.sparse.csgraph import maximum_flow

    sources, targets = sorted(set(sources)), sorted(set(targets))
    if not sources or not targets:
        return 0
    n = D.n
    # v_in = 2v, v_out = 2v + 1, super source 2n, super sink 2n + 1
    rows, cols = [], []
    for v in range(n):
        rows.append(2 * v)
        cols.append(2 * v + 1)
    for (u, v) in set(D.multiplicity):
        if u != v:
            rows.append(2 * u + 1)
            cols.append(2 * v)
    for s in sources:
        rows.append(2 * n)
        cols.append(2 * s)
    for t in targets:
        rows.append(2 * t + 1)
        cols.append(2 * n + 1)
    size = 2 * n + 2
    cap = csr_array((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(size, size))
    cap.sum_duplicates()
    cap.data[:] = 1
    return int(maximum_flow(cap, 2 * n, 2 * n + 1).flow_value)


def disjoint_paths(f, R1, R2, n: int) -> int:
    real = _real(f, n)
    R1, R2 = _ray_by_name(f, R1), _ray_by_name(f, R2)
    return max_vertex_disjoint_paths(real.digraph, R1.indices(real), R2.indices(real))


def doubling_schedule(n: int) -> tuple[int, int, int]:
    sched = (max(1, n // 4), max(1, n // 2), n)
    if not (sched[0] < sched[1] < sched[2]):
        raise ValueError("truncation size too small for a strictly increasing schedule")
    return sched


@dataclass
class EndsReport:
    rays: list[str]
    schedule: tuple
    growth: dict
    relation: dict
    classes: list[list[str]]
    order: list[tuple[int, int]]
    cross_validation: dict | None
    notice: str = ""

    def class_of(self, ray_name: str) -> int:
        for i, c in enumerate(self.classes):
            if ray_name in c:
                return i
        raise KeyError(ray_name)

    def to_record(self) -> dict:
        return {
            "rays": self.rays,
            "schedule": list(self.schedule),
            "growth": [{"source": a, "target": b, "counts": list(v)}
                       for (a, b), v in sorted(self.growth.items())],
            "relation": [{"source": a, "target": b, "accepted": v}
                         for (a, b), v in sorted(self.relation.items())],
            "classes": self.classes,
            "order": [list(p) for p in self.order],
            "cross_validation": (None if self.cross_validation is None else
                                 [{"source": a, "target": b, "agrees": v}
                                  for (a, b), v in sorted(self.cross_validation.items())]),
            "notice": self.notice,
        }


def ball_escape(f, R1, R2, n: int, r_grid=DEFAULT_R_PROBE, probes=None) -> bool:
    """No probe and radius rules out an R1-R2 path avoiding both balls."""
    real = _real(f, n)
    R1, R2 = _ray_by_name(f, R1), _ray_by_name(f, R2)
    return all(st != REFUTED for r in r_grid
               for *_, st in _search(f, real, R1, R2, r, probes))


def ends_partition(f, n: int = 20, min_paths: int = 3) -> EndsReport:
    """Accept R1 below R2 when disjoint paths strictly grow over the schedule and reach min_paths."""
    specs = rays(f)
    if not specs:
        raise ValueError("family has no designated rays")
    names = [R.name for R in specs]
    sched = doubling_schedule(n)
    growth, relation = {}, {}
    for R1 in specs:
        for R2 in specs:
            counts = tuple(disjoint_paths(f, R1, R2, m) for m in sched)
            growth[(R1.name, R2.name)] = counts
            relation[(R1.name, R2.name)] = bool(
                counts[-1] >= min_paths and all(a < b for a, b in zip(counts, counts[1:])))
    cross, notice = None, ""
    if family_info(f).locally_finite:
        cross = {}
        for R1 in specs:
            for R2 in specs:
                cross[(R1.name, R2.name)] = (
                    ball_escape(f, R1, R2, n) == relation[(R1.name, R2.name)])
    else:
        notice = "not locally finite: ball-escape cross-validation skipped"
    edges = [(i, j) for i, a in enumerate(names) for j, b in enumerate(names)
             if i != j and relation[(a, b)]]
    comps = scc(Digraph(len(names), edges))
    comp_of = {i: k for k, c in enumerate(comps) for i in c}
    order = sorted({(comp_of[i], comp_of[j]) for i, j in edges if comp_of[i] != comp_of[j]})
    return EndsReport(names, sched, growth, relation,
                      [[names[i] for i in c] for c in comps], order, cross, notice)


@dataclass
class RefinementMap:
    mapping: dict
    straddling: list
    total: bool
    provisional: bool

    @property
    def ok(self) -> bool:
        return self.total and not self.straddling

    def to_record(self) -> dict:
        return {"mapping": {str(k): v for k, v in self.mapping.items()},
                "straddling": self.straddling, "total": self.total,
                "provisional": self.provisional, "ok": self.ok}


def refinement_map(f, n: int = 20, M_cap: int = 4, r_probe=DEFAULT_R_PROBE) -> RefinementMap:
    """Send each boundary class to the end class of its representatives."""
    bp = boundary_partition(f, n, M_cap, r_probe)
    ends = ends_partition(f, n)
    mapping, straddling = {}, []
    for k, cls in enumerate(bp.classes):
        targets = sorted({ends.class_of(name) for name in cls})
        if len(targets) == 1:
            mapping[k] = targets[0]
        else:
            straddling.append({"class": cls, "ends": targets})
    return RefinementMap(mapping, straddling, len(mapping) == len(bp.classes), bp.provisional)


# ---------------------------------------------------------------------------
# limit geodesics


@dataclass
class ExtractionReport:
    labels: list[str]
    out_bound: object
    in_bound: object

    def to_record(self) -> dict:
        return {"labels": self.labels, "out_bound": to_json(self.out_bound),
                "in_bound": to_json(self.in_bound)}


def extract_geodesic_ray(f, Q, n: int, max_degree: int | None = None):
    """Limit of geodesics from Q(0) to Q(i), choosing the most shared next vertex.

    For an anti-ray the geodesics run from Q(i) to Q(0) and are built from the
    end.  Ties go to the smallest label.  Returns a RaySpec plus the largest
    distances from Q to the result and from the result to Q.
    """
    real = _real(f, n)
    Q = _ray_by_name(f, Q)
    D = real.digraph
    raw = D.distances.raw
    qs = Q.indices(real)
    if not qs:
        raise ValueError("ray has no vertices in the truncation")
    forward = Q.kind == "ray"
    root = qs[0]
    deg = D.out_degree(root) if forward else D.in_degree(root)
    if max_degree is not None and deg > max_degree:
        raise ValueError(f"degree {deg} at the root exceeds {max_degree}")
    far = [q for q in qs[1:] if (raw[root, q] if forward else raw[q, root]) < FAR]
    prefix = [root]
    while True:
        u = prefix[-1]
        k = len(prefix) - 1
        alive = [q for q in far if (raw[root, q] if forward else raw[q, root]) > k]
        if not alive:
            break
        nbrs = sorted(set(D.successors(u) if forward else D.predecessors(u)))
        best, best_score = None, 0
        for w in nbrs:
            if forward:
                on = [q for q in alive if raw[root, w] == k + 1
                      and raw[root, w] + raw[w, q] == raw[root, q]]
            else:
                on = [q for q in alive if raw[w, root] == k + 1
                      and raw[q, w] + raw[w, root] == raw[q, root]]
            score = len(on)
            if score > best_score or (score == best_score and best is not None
                                      and D.labels[w] < D.labels[best]):
                if score > 0:
                    best, best_score = w, score
        if best is None:
            break
        prefix.append(best)
        if forward:
            far = [q for q in alive if raw[root, best] + raw[best, q] == raw[root, q]]
        else:
            far = [q for q in alive if raw[q, best] + raw[best, root] == raw[q, root]]
    labels = [D.labels[v] for v in prefix]

    def label_at(i: int, _labels=tuple(labels)) -> str:
        if i >= len(_labels):
            return f"<beyond truncation {len(_labels) - 1}>"
        return _labels[i]

    spec = RaySpec(f"limit({Q.name})", Q.kind, label_at, True, Q.symbol)
    gv = np.asarray(prefix)
    qv = np.asarray(qs)
    out_b = int(max(raw[np.ix_(qv, gv)].min(axis=0).max(), raw[np.ix_(gv, qv)].min(axis=0).max()))
    in_b = int(max(raw[np.ix_(gv, qv)].min(axis=1).max(), raw[np.ix_(qv, gv)].min(axis=1).max()))
    report = ExtractionReport(labels, INF if out_b >= FAR else out_b, INF if in_b >= FAR else in_b)
    return spec, report


# ---------------------------------------------------------------------------
# rho and the chain distance


@dataclass
class RhoMatrix:
    points: list[str]
    rho: list[list]
    rho_eps: list[list]
    epsilon: object = None
    epsilon_prime: object = None
    window: tuple = (0, 0)
    base: Fraction | None = None

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for row in self.rho_eps for v in row)

    def to_record(self) -> dict:
        return {"points": self.points,
                "rho": [[to_json(v) for v in row] for row in self.rho],
                "rho_eps": [[to_json(v) if isinstance(v, (int, Fraction)) else v for v in row]
                            for row in self.rho_eps],
                "epsilon": to_json(self.epsilon) if self.epsilon is not None else None,
                "epsilon_prime": (to_json(self.epsilon_prime)
                                  if self.epsilon_prime is not None else None),
                "window": list(self.window),
                "base": to_json(self.base) if self.base is not None else None}


def rho_weight(rho_value, base=None, epsilon=None):
    """b^(-rho) exactly for a rational base, else e^(-epsilon rho); infinity maps to 0."""
    if rho_value is INF:
        return Fraction(0) if base is not None else 0.0
    if base is not None:
        return Fraction(1) / Fraction(base) ** int(rho_value)
    return math.exp(-float(epsilon) * float(rho_value))


def _point_vertices(real: BallRealization, p, window) -> list[int]:
    D = real.digraph
    if isinstance(p, RaySpec):
        lo, hi = window
        return [D.index(p.label_at(i)) for i in range(lo, hi + 1) if D.has_label(p.label_at(i))]
    if isinstance(p, str):
        return [D.index(p)]
    return [int(p)]


def _rho_s(raw: np.ndarray, sym_s: np.ndarray, A: Sequence[int], B: Sequence[int]):
    """Least d<->(s, p) over points p of geodesics from A to B; None when no pair connects."""
    best = None
    for a in A:
        da = raw[a]
        for b in B:
            d = int(da[b])
            if d >= FAR:
                continue
            on = (da + raw[:, b]) == d
            m = int(sym_s[on].min())
            if best is None or m < best:
                best = m
    return best


def rho_matrix(f_or_D, S: Sequence, points: Sequence, window=(5, 10), n: int | None = None,
               base=None, epsilon=None, empty: str = "separated") -> RhoMatrix:
    """Tail-window approximation of rho_S between vertices and designated rays.

    Rays contribute their positions in ``window``; vertices stand for
    themselves.  Identical points get rho = INF.  A pair with no finite
    connection in the window gets rho = 0 (``empty="separated"``) or INF
    (``empty="infinite"``).  Weights are b^(-rho) for a rational ``base`` and
    e^(-epsilon rho) otherwise.
    """
    if empty not in ("separated", "infinite"):
        raise ValueError("empty must be 'separated' or 'infinite'")
    if base is None and epsilon is None:
        base = Fraction(2)
    if isinstance(f_or_D, Digraph):
        real = BallRealization(f_or_D, 0, 0)
    else:
        if n is None:
            raise ValueError("a family needs a truncation size n")
        real = _real(f_or_D, n)
        if window[1] > real.stable_core:
            raise ValueError("window exceeds the stable core of the truncation")
    D = real.digraph
    if not S:
        raise ValueError("base set S must be nonempty")
    svs = [D.index(s) if isinstance(s, str) else int(s) for s in S]
    ok, uncovered = base_check(D, svs)
    if not ok:
        raise ValueError(f"S is not a base of the truncation: {len(uncovered)} vertices uncovered")
    raw = D.distances.raw
    verts = [_point_vertices(real, p, window) for p in points]
    names = [p.name if isinstance(p, RaySpec) else (p if isinstance(p, str) else D.labels[p])
             for p in points]
    k = len(points)
    rho = [[INF] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            vals = []
            for s in svs:
                sym = np.minimum(raw[s], raw[:, s])
                v = _rho_s(raw, sym, verts[i], verts[j])
                vals.append(v)
            if all(v is None for v in vals):
                rho[i][j] = 0 if empty == "separated" else INF
            else:
                rho[i][j] = min(v for v in vals if v is not None)
    weights = [[rho_weight(v, base, epsilon) for v in row] for row in rho]
    return RhoMatrix(names, rho, weights, epsilon, None, tuple(window),
                     Fraction(base) if base is not None else None)


def chain_distance(m) -> list[list]:
    """Cheapest chain between every ordered pair, weights rho_eps (Floyd-Warshall)."""
    w = m.rho_eps if isinstance(m, RhoMatrix) else m
    k = len(w)
    zero = Fraction(0) if all(isinstance(v, (int, Fraction)) for row in w for v in row) else 0.0
    d = [[zero if i == j else w[i][j] for j in range(k)] for i in range(k)]
    for mid in range(k):
        dm = d[mid]
        for i in range(k):
            dim = d[i][mid]
            row = d[i]
            for j in range(k):
                cand = dim + dm[j]
                if cand < row[j]:
                    row[j] = cand
    return d


@dataclass
class ChainReport:
    ok: bool
    hypothesis_holds: bool
    failures: list = field(default_factory=list)
    hypothesis_failures: list = field(default_factory=list)

    def to_record(self) -> dict:
        return {"ok": self.ok, "hypothesis_holds": self.hypothesis_holds,
                "failures": self.failures[:20],
                "hypothesis_failures": self.hypothesis_failures[:20]}


def three_point_failures(w, epsilon_prime, tol=0.0) -> list:
    """Triples (a, b, c) with w[a][b] > eps' max(w[a][c], w[c][b])."""
    k = len(w)
    bad = []
    for a in range(k):
        for b in range(k):
            for c in range(k):
                if w[a][b] > epsilon_prime * max(w[a][c], w[c][b]) + tol:
                    bad.append((a, b, c))
    return bad


def verify_chain_inequality(m, epsilon_prime=None, tol: float = 1e-9) -> ChainReport:
    """(3 - 2 eps') w <= chain distance <= w on every off-diagonal pair.

    The bound is only asserted when the three-point hypothesis holds and
    eps' < sqrt 2; otherwise the report marks a hypothesis failure.
    """
    w = m.rho_eps if isinstance(m, RhoMatrix) else m
    ep = epsilon_prime if epsilon_prime is not None else m.epsilon_prime
    if ep is None:
        raise ValueError("epsilon_prime is required")
    exact = all(isinstance(v, (int, Fraction)) for row in w for v in row) and \
        isinstance(ep, (int, Fraction))
    t = 0 if exact else tol
    hyp = three_point_failures(w, ep, t)
    sqrt2_ok = (Fraction(ep) ** 2 < 2) if exact else (float(ep) < math.sqrt(2))
    if hyp or not sqrt2_ok or any(w[i][i] != 0 for i in range(len(w))):
        reasons = [{"triple": list(x)} for x in hyp]
        if not sqrt2_ok:
            reasons.append({"epsilon_prime": "not below sqrt 2"})
        if any(w[i][i] != 0 for i in range(len(w))):
            reasons.append({"diagonal": "nonzero"})
        return ChainReport(False, False, [], reasons)
    d = chain_distance(w)
    low = 3 - 2 * ep
    fails = []
    for i in range(len(w)):
        for j in range(len(w)):
            if i == j:
                continue
            if low * w[i][j] > d[i][j] + t or d[i][j] > w[i][j] + t:
                fails.append({"pair": [i, j], "rho_eps": str(w[i][j]), "chain": str(d[i][j])})
    return ChainReport(not fails, True, fails, [])


def coincidence_diagnostic(m: RhoMatrix, partition: BoundaryPartition, tol=0) -> list:
    """Ray pairs with chain distance ~0 both ways, and whether they share a boundary class."""
    d = chain_distance(m)
    out = []
    for i, j in combinations(range(m.size), 2):
        a, b = m.points[i], m.points[j]
        if a in partition.rays and b in partition.rays and d[i][j] <= tol and d[j][i] <= tol:
            out.append({"pair": [a, b],
                        "same_class": partition.class_of(a) == partition.class_of(b)})
    return out


# ---------------------------------------------------------------------------
# neighbourhoods, bases, independence


@dataclass
class MembershipResult:
    member: bool
    status: str
    tail_start: int | None = None

    def __bool__(self) -> bool:
        return self.member


def neighborhood_member(f_or_D, target: RaySpec, y, x, r: int, side: str = "C-",
                        n: int | None = None, window=(0, None)) -> MembershipResult:
    """Whether y lies in the C- (or C+) neighbourhood of the class of ``target``.

    C-: some tail of the ray has, for each of its probed points z, a y-z
    geodesic avoiding both r-balls around x.  C+ uses z-y geodesics.  The
    tail start and the probed positions range over ``window``.
    """
    if side not in ("C-", "C+"):
        raise ValueError("side must be 'C-' or 'C+'")
    if isinstance(f_or_D, Digraph):
        real = BallRealization(f_or_D, 0, 0)
        core = frozenset(f_or_D.labels)
    else:
        real = _real(f_or_D, n)
        core = _core_labels(f_or_D, real)
    D = real.digraph
    yv = D.index(y) if isinstance(y, str) else int(y)
    xv = D.index(x) if isinstance(x, str) else int(x)
    pos = target.indices(real)
    lo = window[0]
    hi = len(pos) - 1 if window[1] is None else min(window[1], len(pos) - 1)
    raw = D.distances.raw
    forbidden = ball_mask(D, [xv], r)
    if forbidden[yv]:
        return MembershipResult(False, CERTIFIED)
    allowed = _restricted_distances(D, yv, forbidden, forward=(side == "C-"))
    ok_pos = []
    for i in range(lo, hi + 1):
        z = pos[i]
        d = raw[yv, z] if side == "C-" else raw[z, yv]
        ok_pos.append(d < FAR and allowed[z] == d)
    # need a tail start t with every probed position t..hi fine
    for t in range(lo, hi + 1):
        if all(ok_pos[t - lo:]):
            beyond = any(D.labels[pos[i]] not in core for i in range(t, hi + 1))
            return MembershipResult(True, INCONCLUSIVE if beyond else CERTIFIED, t)
    return MembershipResult(False, CERTIFIED)


def _restricted_distances(D: Digraph, start: int, forbidden: np.ndarray, forward: bool):
    from collections import deque

    dist = np.full(D.n, FAR, dtype=np.int64)
    dist[start] = 0
    q = deque([start])
    while q:
        u = q.popleft()
        for v in (D.successors(u) if forward else D.predecessors(u)):
            if not forbidden[v] and dist[v] == FAR:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def base_check(D: Digraph, S: Iterable) -> tuple[bool, list[int]]:
    """Whether every vertex has finite symmetric-min distance to some member of S."""
    idx = [D.index(s) if isinstance(s, str) else int(s) for s in S]
    raw = D.distances.raw
    if not idx:
        return D.n == 0, list(range(D.n))
    near = ((raw[idx, :] < FAR) | (raw[:, idx].T < FAR)).any(axis=0)
    uncovered = [int(v) for v in np.flatnonzero(~near)]
    return not uncovered, uncovered


@dataclass
class IndependenceResult:
    vertices: list[int]
    exact: bool

    @property
    def size(self) -> int:
        return len(self.vertices)


def independence(D: Digraph, x: int, r: int, sign: str = "out",
                 exact_limit: int = 24) -> IndependenceResult:
    """Largest set in the r-ball of x with infinite distance both ways between members."""
    raw = D.distances.raw
    vec = raw[x, :] if sign == "out" else raw[:, x]
    members = [int(v) for v in np.flatnonzero(vec <= r)]
    linked = {v: {u for u in members if u != v and (raw[u, v] < FAR or raw[v, u] < FAR)}
              for v in members}
    if len(members) > exact_limit:
        chosen: list[int] = []
        for v in sorted(members, key=lambda v: (len(linked[v]), v)):
            if not any(u in linked[v] for u in chosen):
                chosen.append(v)
        return IndependenceResult(sorted(chosen), False)
    best: list[int] = []

    def grow(chosen: list[int], rest: list[int]):
        nonlocal best
        if len(chosen) + len(rest) <= len(best):
            return
        if not rest:
            best = list(chosen)
            return
        v, tail = rest[0], rest[1:]
        grow(chosen + [v], [u for u in tail if u not in linked[v]])
        grow(chosen, tail)

    grow([], members)
    return IndependenceResult(sorted(best), True)
