"""Directed walks, geodesic predicates, and geodesic enumeration/counting."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .core import FAR, Digraph

DEFAULT_CAP = 10_000


class UnreachableError(ValueError):
    pass


@dataclass(frozen=True)
class DirectedWalk:
    """A walk given by its vertex sequence.

    ``edge_choices[i]`` picks which parallel copy of the edge
    ``vertices[i] -> vertices[i+1]`` is used; ``None`` means copy 0 everywhere.
    """

    vertices: tuple[int, ...]
    edge_choices: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("a walk needs at least one vertex")
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))
        if self.edge_choices is not None:
            ch = tuple(int(c) for c in self.edge_choices)
            if len(ch) != len(self.vertices) - 1:
                raise ValueError("one edge choice per step is required")
            object.__setattr__(self, "edge_choices", ch)

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.vertices) - 1

    def choices(self) -> tuple[int, ...]:
        return self.edge_choices if self.edge_choices is not None else (0,) * len(self)

    def is_valid(self, D: Digraph) -> bool:
        mult = D.multiplicity
        for (u, v), c in zip(zip(self.vertices, self.vertices[1:]), self.choices()):
            if not 0 <= c < mult.get((u, v), 0):
                return False
        return all(0 <= v < D.n for v in self.vertices)

    def labelled(self, D: Digraph) -> list[str]:
        return [D.labels[v] for v in self.vertices]

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.vertices)


def walk_length(P: DirectedWalk) -> int:
    return len(P)


def _check_walk(D: Digraph, P: DirectedWalk) -> None:
    if not P.is_valid(D):
        raise ValueError(f"not a walk in the digraph: {P}")


def is_geodesic(D: Digraph, P: DirectedWalk) -> bool:
    """True iff every subwalk realizes the distance between its ends."""
    _check_walk(D, P)
    vs = np.asarray(P.vertices, dtype=np.int64)
    sub = D.distances.raw[np.ix_(vs, vs)]
    idx = np.arange(len(vs))
    gap = idx[None, :] - idx[:, None]
    upper = gap >= 0
    return bool(np.all(sub[upper] == gap[upper]))


def is_quasi_geodesic(D: Digraph, P: DirectedWalk, gamma, c) -> bool:
    """True iff ``j - i <= gamma * d(P_i, P_j) + c`` for all ``i <= j``."""
    _check_walk(D, P)
    gamma = Fraction(gamma)
    c = Fraction(c)
    if gamma < 1 or c < 0:
        raise ValueError("need gamma >= 1 and c >= 0")
    raw = D.distances.raw
    vs = P.vertices
    for i in range(len(vs)):
        row = raw[vs[i]]
        for j in range(i, len(vs)):
            d = int(row[vs[j]])
            if d >= FAR:
                continue
            if j - i > gamma * d + c:
                return False
    return True


@dataclass
class GeodesicSummary:
    count: int
    sample: list[DirectedWalk]
    truncated: bool


def _dag(D: Digraph, x: int, y: int):
    raw = D.distances.raw
    total = int(raw[x, y])
    if total >= FAR:
        raise UnreachableError(f"unreachable: no directed path from {x} to {y}")
    dx = raw[x]
    dy = raw[:, y]
    on = np.flatnonzero((dx + dy) == total)
    arcs: dict[int, list[int]] = {}
    for u in on:
        u = int(u)
        du = int(dx[u])
        arcs[u] = [v for v in D.successors(u)
                   if dx[v] == du + 1 and dy[v] == total - du - 1]
    return total, on, arcs


def count_geodesics(D: Digraph, x: int, y: int, *, distinct_vertices: bool = False) -> int:
    """Exact number of x-y geodesics; parallel edges count separately.

    With ``distinct_vertices`` the count is of vertex sequences instead.
    """
    total, on, arcs = _dag(D, x, y)
    raw = D.distances.raw
    mult = D.multiplicity
    ways: dict[int, int] = {}
    for u in sorted((int(u) for u in on), key=lambda u: -int(raw[x, u])):
        if u == y:
            ways[u] = 1
            continue
        s = 0
        for v in arcs[u]:
            w = ways.get(v, 0)
            s += w if distinct_vertices else mult[(u, v)] * w
        ways[u] = s
    return ways.get(x, 0)


def iter_geodesic_paths(D: Digraph, x: int, y: int) -> Iterator[tuple[int, ...]]:
    """Vertex sequences of x-y geodesics in lexicographic order."""
    total, _, arcs = _dag(D, x, y)
    path = [x]
    stack = [iter(arcs.get(x, ()))]
    if total == 0:
        yield (x,)
        return
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            path.pop()
            continue
        path.append(nxt)
        if nxt == y:
            yield tuple(path)
            path.pop()
            continue
        stack.append(iter(arcs.get(nxt, ())))


def geodesic_paths(D: Digraph, x: int, y: int, cap: int = DEFAULT_CAP):
    """Up to ``cap`` geodesic vertex sequences plus a truncation flag."""
    out = []
    for p in iter_geodesic_paths(D, x, y):
        if len(out) == cap:
            return out, True
        out.append(p)
    return out, False


def _expand_choices(D: Digraph, path: tuple[int, ...]) -> Iterator[DirectedWalk]:
    mult = D.multiplicity
    ranges = [range(mult[(u, v)]) for u, v in zip(path, path[1:])]
    if not ranges:
        yield DirectedWalk(path, ())
        return
    idx = [0] * len(ranges)
    while True:
        yield DirectedWalk(path, tuple(idx))
        k = len(idx) - 1
        while k >= 0:
            idx[k] += 1
            if idx[k] < len(ranges[k]):
                break
            idx[k] = 0
            k -= 1
        if k < 0:
            return


def enumerate_geodesics(D: Digraph, x: int, y: int, cap: int = DEFAULT_CAP) -> GeodesicSummary:
    """All x-y geodesics in lexicographic order (vertex, then edge copy), up to cap."""
    if cap < 1:
        raise ValueError("cap must be positive")
    count = count_geodesics(D, x, y)
    sample: list[DirectedWalk] = []
    for path in iter_geodesic_paths(D, x, y):
        for w in _expand_choices(D, path):
            if len(sample) == cap:
                return GeodesicSummary(count, sample, True)
            sample.append(w)
    return GeodesicSummary(count, sample, False)


def simple_walks(D: Digraph, x: int, y: int, max_len: int, cap: int = DEFAULT_CAP):
    """Simple directed x-y walks of length <= max_len, lexicographic, up to cap."""
    raw = D.distances.raw
    out: list[tuple[int, ...]] = []
    if raw[x, y] >= FAR or raw[x, y] > max_len:
        return out, False
    path = [x]
    used = {x}
    stack = [iter(D.successors(x))]
    if x == y:
        return [(x,)], False
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            used.discard(path.pop())
            continue
        if nxt in used:
            continue
        steps = len(path)
        # prune when even a shortest continuation would be too long
        if steps + int(min(raw[nxt, y], FAR)) > max_len:
            continue
        if nxt == y:
            if len(out) == cap:
                return out, True
            out.append(tuple(path) + (y,))
            continue
        path.append(nxt)
        used.add(nxt)
        stack.append(iter(D.successors(nxt)))
    return out, False


def walks_through(vertices: Sequence[int]) -> DirectedWalk:
    return DirectedWalk(tuple(vertices))
