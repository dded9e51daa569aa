"""Thin and slim triangle defects, the global constant, and bound profiles.

A triangle has endpoints ``(x, y, z)``; side ``k`` joins endpoint ``k`` and
endpoint ``k+1 (mod 3)``.  Bit ``k`` of the 3-bit ``pattern`` says whether side
``k`` runs backwards.  Patterns 0 and 7 are the two cyclic orientations, the
other six are transitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .core import FAR, Digraph
from .extnat import INF, to_json
from .geodesics import DEFAULT_CAP, DirectedWalk, geodesic_paths, is_geodesic

CYCLIC_PATTERNS = (0, 7)
TRANSITIVE_PATTERNS = (1, 2, 3, 4, 5, 6)
ALL_PATTERNS = tuple(range(8))


def side_ends(endpoints: Sequence[int], pattern: int) -> list[tuple[int, int]]:
    """(start, end) of each side for the given orientation pattern."""
    out = []
    for k in range(3):
        a, b = endpoints[k], endpoints[(k + 1) % 3]
        out.append((b, a) if (pattern >> k) & 1 else (a, b))
    return out


def is_transitive_pattern(pattern: int) -> bool:
    return pattern not in CYCLIC_PATTERNS


@dataclass(frozen=True)
class GeodesicTriangle:
    endpoints: tuple[int, int, int]
    sides: tuple[DirectedWalk, DirectedWalk, DirectedWalk]
    pattern: int

    def __post_init__(self):
        ends = side_ends(self.endpoints, self.pattern)
        for (a, b), side in zip(ends, self.sides):
            if side.start != a or side.end != b:
                raise ValueError(f"side {side} does not run from {a} to {b}")

    @property
    def transitive(self) -> bool:
        return is_transitive_pattern(self.pattern)

    def validate(self, D: Digraph) -> None:
        for side in self.sides:
            if not is_geodesic(D, side):
                raise ValueError(f"side {side} is not a geodesic")

    def to_record(self, D: Digraph | None = None) -> dict:
        lab = (lambda v: D.labels[v]) if D is not None else (lambda v: v)
        return {
            "triple": [lab(v) for v in self.endpoints],
            "pattern": self.pattern,
            "transitive": self.transitive,
            "sides": [[lab(v) for v in s.vertices] for s in self.sides],
        }


def _assignments(ends, i):
    """Valid (Q, R) side indices for side i under the thin condition."""
    s, e = ends[i]
    j, k = (i + 1) % 3, (i + 2) % 3
    out = []
    for q, r in ((j, k), (k, j)):
        if s in ends[q] and e in ends[r]:
            out.append((q, r))
    return out


def triangle_defect(D: Digraph, T: GeodesicTriangle, kind: str = "thin") -> int:
    """Least delta for which T is delta-thin (or delta-slim)."""
    raw = D.distances.raw
    ends = [(s.start, s.end) for s in T.sides]
    verts = [np.asarray(s.vertices) for s in T.sides]
    best = 0
    for i in range(3):
        P = verts[i]
        if kind == "thin":
            assigns = _assignments(ends, i)
            if not assigns:
                raise RuntimeError("side has no valid (Q, R) assignment")
            for q, r in assigns:
                from_q = raw[np.ix_(verts[q], P)].min(axis=0)
                to_r = raw[np.ix_(P, verts[r])].min(axis=1)
                best = max(best, int(np.minimum(from_q, to_r).max()))
        elif kind == "slim":
            j, k = (i + 1) % 3, (i + 2) % 3
            out_j = raw[np.ix_(verts[j], P)].min(axis=0)
            out_k = raw[np.ix_(verts[k], P)].min(axis=0)
            in_j = raw[np.ix_(P, verts[j])].min(axis=1)
            in_k = raw[np.ix_(P, verts[k])].min(axis=1)
            best = max(best, int(np.minimum(out_j, out_k).max()),
                       int(np.minimum(in_j, in_k).max()))
        else:
            raise ValueError(f"unknown defect kind {kind!r}")
    return INF if best >= FAR else best


class GeodesicStore:
    """Flattened geodesic vertex sequences for a set of ordered pairs.

    Per-geodesic distance vectors (``outv[g, v] = min_q d(q, v)`` and
    ``inv[g, v] = min_q d(v, q)``) are precomputed for the triangle kernels.
    """

    def __init__(self, D: Digraph, pairs: Iterable[tuple[int, int]] | None = None,
                 cap: int = DEFAULT_CAP):
        self.D = D
        self.cap = cap
        raw = D.distances.raw
        n = D.n
        if pairs is None:
            pairs = [(int(a), int(b)) for a, b in zip(*np.nonzero(raw < FAR))]
        pairs = sorted(set(pairs))
        self.pair_first = np.zeros((n, n), dtype=np.int64)
        self.pair_cnt = np.zeros((n, n), dtype=np.int64)
        starts, lens, flat = [], [], []
        self.truncated_pairs: list[tuple[int, int]] = []
        for a, b in pairs:
            if raw[a, b] >= FAR:
                continue
            paths, trunc = geodesic_paths(D, a, b, cap)
            if trunc:
                self.truncated_pairs.append((a, b))
            self.pair_first[a, b] = len(starts)
            self.pair_cnt[a, b] = len(paths)
            for p in paths:
                starts.append(len(flat))
                lens.append(len(p))
                flat.extend(p)
        self.geo_start = np.asarray(starts, dtype=np.int64)
        self.geo_len = np.asarray(lens, dtype=np.int64)
        self.geo_verts = np.asarray(flat, dtype=np.int64)
        self.outv, self.inv = _kernels.geodesic_vectors(raw, self.geo_start, self.geo_len,
                                                        self.geo_verts)

    @property
    def exhaustive(self) -> bool:
        return not self.truncated_pairs

    def walk(self, g: int) -> DirectedWalk:
        s = int(self.geo_start[g])
        return DirectedWalk(tuple(int(v) for v in self.geo_verts[s:s + int(self.geo_len[g])]))

    def kernel_args(self):
        return (self.pair_first, self.pair_cnt, self.geo_start, self.geo_len,
                self.geo_verts, self.outv, self.inv)


@dataclass
class DeltaResult:
    delta: object
    witness: GeodesicTriangle | None
    exhaustive: bool
    triangles: int
    kind: str = "thin"
    mode: str = "all"

    def to_record(self, D: Digraph | None = None) -> dict:
        w = self.witness.to_record(D) if self.witness is not None else None
        return {
            "delta": to_json(self.delta),
            "kind": self.kind,
            "mode": self.mode,
            "witness_triple": w["triple"] if w else None,
            "witness_pattern": w["pattern"] if w else None,
            "witness_sides": w["sides"] if w else None,
            "exhaustive": self.exhaustive,
            "triangles_examined": self.triangles,
        }


_KIND = {"thin": _kernels.THIN, "slim": _kernels.SLIM}


def _patterns(mode: str) -> np.ndarray:
    if mode == "all":
        return np.asarray(ALL_PATTERNS, dtype=np.int64)
    if mode == "transitive":
        return np.asarray(TRANSITIVE_PATTERNS, dtype=np.int64)
    if mode == "cyclic":
        return np.asarray(CYCLIC_PATTERNS, dtype=np.int64)
    raise ValueError(f"unknown triangle mode {mode!r}")


def _witness(store: GeodesicStore, wit) -> GeodesicTriangle:
    x, y, z, pat, g0, g1, g2 = (int(v) for v in wit)
    return GeodesicTriangle((x, y, z), (store.walk(g0), store.walk(g1), store.walk(g2)), pat)


def delta(D: Digraph, kind: str = "thin", mode: str = "all", cap: int = DEFAULT_CAP,
          store: GeodesicStore | None = None, vertices: Sequence[int] | None = None
          ) -> DeltaResult:
    """Largest triangle defect over all endpoint triples, patterns and geodesics.

    Endpoints may coincide.  ``vertices`` restricts the endpoints to a subset.
    """
    if store is None:
        store = GeodesicStore(D, cap=cap)
    verts = np.arange(D.n, dtype=np.int64) if vertices is None else \
        np.asarray(sorted(set(vertices)), dtype=np.int64)
    params = np.zeros(4, dtype=np.int64)
    best, wit, total = _kernels.scan_all(verts, _patterns(mode), _KIND[kind],
                                         *store.kernel_args(), params)
    if best < 0:
        return DeltaResult(0, None, store.exhaustive, total, kind, mode)
    return DeltaResult(best, _witness(store, wit), store.exhaustive, total, kind, mode)


def delta_on_triples(D: Digraph, triples: Sequence[tuple[int, int, int]], kind: str = "thin",
                     mode: str = "all", cap: int = DEFAULT_CAP) -> DeltaResult:
    """Largest defect over triangles whose endpoints are one of ``triples``."""
    pairs = set()
    for t in triples:
        for a in t:
            for b in t:
                pairs.add((a, b))
    store = GeodesicStore(D, pairs, cap)
    arr = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    params = np.zeros(4, dtype=np.int64)
    best, wit, total = _kernels.scan_triples(arr, _patterns(mode), _KIND[kind],
                                             *store.kernel_args(), params)
    if best < 0:
        return DeltaResult(0, None, store.exhaustive, total, kind, mode)
    return DeltaResult(best, _witness(store, wit), store.exhaustive, total, kind, mode)


# ---------------------------------------------------------------------------
# zero-hyperbolicity


def _find_cycle(D: Digraph) -> list[int] | None:
    """A directed cycle (first vertex repeated at the end), or None."""
    color = [0] * D.n
    parent = [-1] * D.n
    for root in range(D.n):
        if color[root]:
            continue
        stack = [(root, iter(D.successors(root)))]
        color[root] = 1
        while stack:
            u, it = stack[-1]
            v = next(it, None)
            if v is None:
                color[u] = 2
                stack.pop()
                continue
            if color[v] == 1:
                cyc = [v]
                w = u
                while w != v:
                    cyc.append(w)
                    w = parent[w]
                cyc.append(v)
                cyc.reverse()
                return cyc
            if color[v] == 0:
                color[v] = 1
                parent[v] = u
                stack.append((v, iter(D.successors(v))))
    return None


def is_zero_hyperbolic(D: Digraph) -> tuple[bool, tuple[DirectedWalk, DirectedWalk] | None]:
    """Combinatorial 0-hyperbolicity: at most one directed path between any two vertices.

    Loops, parallel edges and cycles each give two distinct walks with the
    same ends; otherwise the digraph is acyclic and path counts decide.
    """
    for (u, v), m in sorted(D.multiplicity.items()):
        if u == v:
            return False, (DirectedWalk((u,)), DirectedWalk((u, u), (0,)))
        if m > 1:
            return False, (DirectedWalk((u, v), (0,)), DirectedWalk((u, v), (1,)))
    cyc = _find_cycle(D)
    if cyc is not None:
        return False, (DirectedWalk((cyc[0],)), DirectedWalk(tuple(cyc)))
    order = _topological_order(D)
    for x in range(D.n):
        ways = [0] * D.n
        via = [-1] * D.n
        ways[x] = 1
        for u in order:
            if not ways[u]:
                continue
            for v in D.successors(u):
                if ways[v] and via[v] != u:
                    return False, _two_paths(D, x, v, via[v], u)
                ways[v] += ways[u]
                via[v] = u
    return True, None


def _topological_order(D: Digraph) -> list[int]:
    indeg = [0] * D.n
    for u in range(D.n):
        for v in D.successors(u):
            indeg[v] += 1
    ready = sorted(u for u in range(D.n) if indeg[u] == 0)
    order = []
    import heapq
    heapq.heapify(ready)
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in D.successors(u):
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    return order


def _path_between(D: Digraph, x: int, y: int) -> list[int]:
    prev = {x: None}
    queue = [x]
    for u in queue:
        if u == y:
            break
        for v in D.successors(u):
            if v not in prev:
                prev[v] = u
                queue.append(v)
    out = [y]
    while out[-1] != x:
        out.append(prev[out[-1]])
    return out[::-1]


def _two_paths(D, x, v, p1, p2):
    a = _path_between(D, x, p1) + [v]
    b = _path_between(D, x, p2) + [v]
    return DirectedWalk(tuple(a)), DirectedWalk(tuple(b))


# ---------------------------------------------------------------------------
# bound profiles and constants


@dataclass
class BoundProfile:
    direction: str
    values: list

    def __call__(self, r: int):
        if r < 0:
            return 0
        if r >= len(self.values):
            raise KeyError(f"profile only known up to radius {len(self.values) - 1}")
        return self.values[r]

    def to_record(self) -> dict:
        return {"direction": self.direction, "values": [to_json(v) for v in self.values]}


def bound_profile(D: Digraph, direction: str = "out", r_max: int = 6) -> BoundProfile:
    """Largest finite distance between two points of a common r-ball, per r."""
    raw = D.distances.raw
    vals = [0] * (r_max + 1)
    finite = raw < FAR
    masked = np.where(finite, raw, -1)
    for x in range(D.n):
        vec = raw[x, :] if direction == "out" else raw[:, x]
        for r in range(r_max + 1):
            members = np.flatnonzero(vec <= r)
            if len(members) < 2:
                continue
            m = int(masked[np.ix_(members, members)].max())
            if m > vals[r]:
                vals[r] = m
    return BoundProfile(direction, vals)


def ball_diameter_bound(r: int, delta_value: int, degree: int) -> int:
    """2 r sum_{i<=delta} (degree-1)^i, the ball-diameter bound for bounded degree."""
    return 2 * r * sum((degree - 1) ** i for i in range(int(delta_value) + 1))


@dataclass
class ConstantTable:
    delta: Fraction
    f_of_delta_plus_1: Fraction
    narrow_radius: Fraction
    tracking_K: Fraction
    stability_kappa: Fraction
    epsilon_prime: Fraction
    divergence_k: Fraction
    divergence_e0: Fraction

    def to_record(self) -> dict:
        return {k: to_json(Fraction(v)) for k, v in self.__dict__.items()}

    def divergence_e(self, r):
        return divergence_e(r, self.delta, self.divergence_k)


def _as_fn(f) -> Callable:
    if f is None:
        return None
    if callable(f):
        return f
    seq = list(f)
    return lambda r: seq[r]


def named_constants(delta_value, f, g=None, M=0, gamma=1, c=0, epsilon=1,
                    base=None) -> ConstantTable:
    """Evaluate the named constants for measured delta and bound function f.

    ``base`` is the rational stand-in for e^epsilon; when given, epsilon_prime
    is exactly ``base ** (2 k)``.  Otherwise e^(2 epsilon k) is evaluated in
    floating point and stored as the exact rational of that float.
    """
    fn = _as_fn(f)
    d = Fraction(delta_value)
    if d.denominator != 1:
        raise ValueError("delta must be a natural number for profile lookup")
    try:
        f1 = Fraction(fn(int(d) + 1))
        f0 = Fraction(fn(int(d)))
    except (KeyError, IndexError) as exc:
        raise ValueError(f"f undefined at a needed argument: {exc}") from None
    eps = Fraction(epsilon)
    M = Fraction(M)
    k = 6 * d + 2 * d * f1
    if base is not None:
        eprime = Fraction(base) ** int(2 * k) if k.denominator == 1 else None
        if eprime is None:
            raise ValueError("base proxy needs an integral exponent")
    else:
        eprime = Fraction(math.exp(float(2 * eps * k)))
    return ConstantTable(
        delta=d,
        f_of_delta_plus_1=f1,
        narrow_radius=k,
        tracking_K=(2 * M + 5 * d) + (2 * M + 2 * d + 1) * f1,
        stability_kappa=k,
        epsilon_prime=eprime,
        divergence_k=k,
        divergence_e0=(2 * d + eps + 1) * f1 + f0 + d,
    )


def divergence_e(r, delta_value, k):
    """e(r) = 2^((r - 2 delta - 1) / k) - 1 as a float, with the k = 0 limits."""
    expo = Fraction(r) - 2 * Fraction(delta_value) - 1
    if k == 0:
        return math.inf if expo > 0 else -1.0
    return 2.0 ** float(expo / Fraction(k)) - 1.0


def exceeds_divergence_bound(length: int, r, delta_value, k) -> bool:
    """Exact test of ``length > e(r)``."""
    expo = Fraction(r) - 2 * Fraction(delta_value) - 1
    if k == 0:
        return expo <= 0
    if expo < 0:
        return True
    # length + 1 > 2^(expo/k)  <=>  (length + 1)^(k q) > 2^(p) with expo/k = p/q
    ratio = expo / Fraction(k)
    return (length + 1) ** ratio.denominator > 2 ** ratio.numerator


def stability_lambda(delta_value, f, gamma, c, kappa) -> Fraction:
    """max{2k + 2 g k f(d+1) + g f(d) + c, (k + d) f(d+1) + 1 + d + g (2k + 1) + c}."""
    fn = _as_fn(f)
    d = Fraction(delta_value)
    g = Fraction(gamma)
    c = Fraction(c)
    kap = Fraction(kappa)
    f1 = Fraction(fn(int(d) + 1))
    f0 = Fraction(fn(int(d)))
    return max(2 * kap + 2 * g * kap * f1 + g * f0 + c,
               (kap + d) * f1 + 1 + d + g * (2 * kap + 1) + c)


# ---------------------------------------------------------------------------
# bounds verification


@dataclass
class BoundsReport:
    ok: bool
    triangles: int
    violation: GeodesicTriangle | None = None
    code: int = 0
    details: dict = field(default_factory=dict)

    def to_record(self, D: Digraph | None = None) -> dict:
        return {
            "ok": self.ok,
            "triangles_examined": self.triangles,
            "violation": self.violation.to_record(D) if self.violation else None,
            "violated": [name for bit, name in ((1, "length"), (2, "parallel_side"))
                         if self.code & bit],
            **self.details,
        }


def _bounds_params(delta_value, f, g, epsilon):
    fn, gn = _as_fn(f), _as_fn(g if g is not None else f)
    eps = int(epsilon)
    if eps != epsilon or eps < 1:
        raise ValueError("epsilon must be a positive integer at vertex granularity")
    d = int(delta_value)
    try:
        f_eps, g_eps, f1 = fn(d + eps), gn(d + eps), fn(d + 1)
    except (KeyError, IndexError) as exc:
        raise ValueError(f"bound profile too short: {exc}") from None
    radius = 6 * d + 2 * d * f1
    for name, v in (("f", f_eps), ("g", g_eps), ("f", f1)):
        if v is INF:
            raise ValueError(f"precondition: {name} is infinite at a needed radius")
    return np.asarray([eps, int(f_eps), int(g_eps), int(radius)], dtype=np.int64), radius


def verify_bounds(D: Digraph, T: GeodesicTriangle, delta_value, f, g=None, epsilon=1
                  ) -> BoundsReport:
    """Check the side-length bound and the parallel-side radius on one triangle."""
    problems = []
    if triangle_defect(D, T, "thin") > delta_value:
        problems.append("triangle is not delta-thin for the supplied delta")
    try:
        params, radius = _bounds_params(delta_value, f, g, epsilon)
    except ValueError as exc:
        problems.append(str(exc))
    if problems:
        raise ValueError("; ".join(problems))
    eps, f_eps, g_eps, radius = (int(v) for v in params)
    raw = D.distances.raw
    ends = [(s.start, s.end) for s in T.sides]
    lens = [len(s) for s in T.sides]
    code = 0
    bad_vertex = None
    for i in range(3):
        for q, r in _assignments(ends, i):
            if eps * lens[i] > lens[q] * f_eps + lens[r] * g_eps:
                code |= 1
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            if ends[i][1] == ends[j][0] and ends[k] == (ends[i][0], ends[j][1]):
                near = np.asarray(T.sides[i].vertices + T.sides[j].vertices)
                for v in T.sides[k].vertices:
                    if raw[near, v].min() > radius or raw[v, near].min() > radius:
                        code |= 2
                        bad_vertex = v
    details = {"radius": radius}
    if bad_vertex is not None:
        details["violating_vertex"] = bad_vertex
    return BoundsReport(code == 0, 1, T if code else None, code, details)


def verify_bounds_all(D: Digraph, delta_value, f, g=None, epsilon=1, mode="transitive",
                      cap: int = DEFAULT_CAP, store: GeodesicStore | None = None
                      ) -> BoundsReport:
    """verify_bounds over every triangle of the given mode (kernel-driven)."""
    params, radius = _bounds_params(delta_value, f, g, epsilon)
    if store is None:
        store = GeodesicStore(D, cap=cap)
    verts = np.arange(D.n, dtype=np.int64)
    code, wit, total = _kernels.scan_all(verts, _patterns(mode), _kernels.BOUNDS,
                                         *store.kernel_args(), params)
    viol = _witness(store, wit) if code > 0 else None
    return BoundsReport(code <= 0, total, viol, max(code, 0),
                        {"radius": int(radius), "exhaustive": store.exhaustive})
