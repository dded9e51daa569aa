"""Finite directed multigraphs and their semimetric distances."""

from __future__ import annotations

from collections import Counter
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .extnat import INF

FAR = _kernels.FAR


class ParseError(ValueError):
    """Malformed input document; the message names the offending line."""


class Digraph:
    """Immutable finite directed multigraph on vertices ``0..n-1``.

    Loops and parallel edges are kept exactly as given.  Distances ignore
    multiplicity, but the zero-hyperbolicity test does not.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (),
                 labels: Mapping[int, str] | Sequence[str] | None = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        es = tuple((int(u), int(v)) for u, v in edges)
        for u, v in es:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        self.n = int(n)
        self.edges = tuple(sorted(es))
        if labels is None:
            lab = tuple(str(i) for i in range(n))
        elif isinstance(labels, Mapping):
            lab = tuple(str(labels.get(i, i)) for i in range(n))
        else:
            lab = tuple(str(x) for x in labels)
            if len(lab) != n:
                raise ValueError("label list length differs from vertex count")
        self.labels = lab
        self._index = None

    # structure -------------------------------------------------------------

    @cached_property
    def multiplicity(self) -> Counter:
        return Counter(self.edges)

    @cached_property
    def _csr(self):
        out = [set() for _ in range(self.n)]
        inc = [set() for _ in range(self.n)]
        for u, v in self.edges:
            out[u].add(v)
            inc[v].add(u)
        out_l = [tuple(sorted(s)) for s in out]
        in_l = [tuple(sorted(s)) for s in inc]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for u in range(self.n):
            indptr[u + 1] = indptr[u] + len(out_l[u])
        indices = np.fromiter((v for row in out_l for v in row), dtype=np.int64,
                              count=int(indptr[-1]))
        return out_l, in_l, indptr, indices

    def successors(self, u: int) -> tuple[int, ...]:
        """Distinct out-neighbours of ``u`` in increasing order."""
        return self._csr[0][u]

    def predecessors(self, u: int) -> tuple[int, ...]:
        return self._csr[1][u]

    def out_degree(self, u: int) -> int:
        return self._out_deg[u]

    def in_degree(self, u: int) -> int:
        return self._in_deg[u]

    @cached_property
    def _out_deg(self):
        deg = [0] * self.n
        for u, _ in self.edges:
            deg[u] += 1
        return deg

    @cached_property
    def _in_deg(self):
        deg = [0] * self.n
        for _, v in self.edges:
            deg[v] += 1
        return deg

    def max_degree(self) -> int:
        """Largest in- or out-degree, counting parallel edges."""
        if self.n == 0:
            return 0
        return max(max(self._out_deg), max(self._in_deg))

    def index(self, label: str) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.labels)}
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"no vertex labelled {label!r}") from None

    def has_label(self, label: str) -> bool:
        try:
            self.index(label)
        except KeyError:
            return False
        return True

    # derived graphs --------------------------------------------------------

    def induced(self, vertices: Iterable[int]) -> tuple["Digraph", list[int]]:
        """Induced subdigraph; returns it with the old index of each new vertex."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Digraph(len(keep), edges, [self.labels[v] for v in keep]), keep

    def reversed(self) -> "Digraph":
        return Digraph(self.n, [(v, u) for u, v in self.edges], self.labels)

    @cached_property
    def distances(self) -> "DistanceMatrix":
        return DistanceMatrix._from_digraph(self)

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, m={len(self.edges)})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Digraph) and self.n == other.n
                and self.edges == other.edges and self.labels == other.labels)

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.labels))


class DistanceMatrix:
    """All-pairs directed distances with ``INF`` for unreachable pairs.

    ``raw`` is a read-only int64 array in which unreachable entries hold the
    internal sentinel ``FAR``; use indexing (``dm[u, v]``) for ExtNat values.
    """

    def __init__(self, raw: np.ndarray):
        raw = np.asarray(raw, dtype=np.int64)
        raw.setflags(write=False)
        self.raw = raw
        self.n = raw.shape[0]

    @classmethod
    def _from_digraph(cls, D: Digraph) -> "DistanceMatrix":
        _, _, indptr, indices = D._csr
        return cls(_kernels.bfs_all_pairs(indptr, indices, D.n))

    def __getitem__(self, key):
        u, v = key
        val = int(self.raw[u, v])
        return INF if val >= FAR else val

    def finite(self, u: int, v: int) -> bool:
        return self.raw[u, v] < FAR

    @cached_property
    def finite_mask(self) -> np.ndarray:
        m = self.raw < FAR
        m.setflags(write=False)
        return m

    def symmetric(self, u: int, v: int):
        return min(self[u, v], self[v, u])

    def row(self, u: int) -> list:
        return [self[u, v] for v in range(self.n)]

    def to_lists(self) -> list[list]:
        return [self.row(u) for u in range(self.n)]


def load_digraph(text: str) -> Digraph:
    """Parse the edge-list format.

    First non-blank line ``n m``; then ``m`` lines ``u v``.  Anything after a
    ``#`` on an edge line is ignored.  A line ``# v text`` (a comment whose
    first token is a vertex index) sets the label of ``v``; other comment
    lines are ignored.
    """
    header = None
    edges: list[tuple[int, int]] = []
    labels: dict[int, str] = {}
    pending_labels: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip().split(None, 1)
            if body and _is_int(body[0]):
                pending_labels.append((lineno, int(body[0]), body[1] if len(body) > 1 else ""))
            continue
        content = line.split("#", 1)[0].split()
        if header is None:
            if len(content) != 2 or not all(_is_int(t) for t in content):
                raise ParseError(f"line {lineno}: expected header 'n m', got {raw!r}")
            n, m = int(content[0]), int(content[1])
            if n < 0 or m < 0:
                raise ParseError(f"line {lineno}: negative count in header")
            header = (n, m)
            continue
        if len(content) != 2 or not all(_is_int(t) for t in content):
            raise ParseError(f"line {lineno}: expected edge 'u v', got {raw!r}")
        u, v = int(content[0]), int(content[1])
        if not (0 <= u < header[0] and 0 <= v < header[0]):
            raise ParseError(f"line {lineno}: vertex index out of range [0, {header[0]})")
        edges.append((u, v))
    if header is None:
        raise ParseError("line 1: missing header 'n m'")
    if len(edges) != header[1]:
        raise ParseError(f"line {lineno if text else 1}: header promises {header[1]} edges, "
                         f"found {len(edges)}")
    for lineno, v, text_label in pending_labels:
        if not 0 <= v < header[0]:
            raise ParseError(f"line {lineno}: label for out-of-range vertex {v}")
        labels[v] = text_label or str(v)
    return Digraph(header[0], edges, labels or None)


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def dump_digraph(D: Digraph) -> str:
    lines = [f"{D.n} {len(D.edges)}"]
    lines += [f"{u} {v}" for u, v in D.edges]
    for i, lab in enumerate(D.labels):
        if lab != str(i):
            lines.append(f"# {i} {lab}")
    return "\n".join(lines) + "\n"


def distance_matrix(D: Digraph) -> DistanceMatrix:
    """Exact all-pairs distances (one BFS per source), cached on ``D``."""
    return D.distances


def distance(D: Digraph, u: int, v: int, mode: str = "directed"):
    dm = D.distances
    if mode == "directed":
        return dm[u, v]
    if mode in ("symmetric-min", "symmetric"):
        return dm.symmetric(u, v)
    raise ValueError(f"unknown distance mode {mode!r}")


def ball(D: Digraph, x: int, r: int, sign: str = "out", open: bool = False) -> frozenset:
    """Out-ball ``{y : d(x,y) <= r}`` or in-ball ``{y : d(y,x) <= r}``."""
    if r is INF:
        raise ValueError("ball radius must be finite")
    raw = D.distances.raw
    vec = raw[x, :] if sign == "out" else raw[:, x]
    hits = vec < r if open else vec <= r
    return frozenset(int(i) for i in np.flatnonzero(hits))


def ball_mask(D: Digraph, centers: Iterable[int], r: int, both: bool = True) -> np.ndarray:
    """Boolean mask of the union of closed out-balls (and in-balls) of radius r."""
    raw = D.distances.raw
    mask = np.zeros(D.n, dtype=bool)
    for x in centers:
        mask |= raw[x, :] <= r
        if both:
            mask |= raw[:, x] <= r
    return mask


def scc(D: Digraph) -> list[list[int]]:
    """Strongly connected components, each sorted, ordered by smallest member."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    if D.n == 0:
        return []
    _, _, indptr, indices = D._csr
    mat = csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr), shape=(D.n, D.n))
    _, comp = connected_components(mat, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(comp):
        groups.setdefault(int(c), []).append(v)
    return sorted(groups.values(), key=lambda g: g[0])


def subdivide(D: Digraph, k: int) -> Digraph:
    """Replace every edge by a directed path of ``k`` edges.

    Original vertices keep their indices and labels; the ``k - 1`` fresh
    vertices of edge number ``e`` are labelled ``"{u}>{v}#{e}.{j}"``.
    """
    if k < 1:
        raise ValueError("subdivision factor must be at least 1")
    if k == 1:
        return Digraph(D.n, D.edges, D.labels)
    labels = list(D.labels)
    edges = []
    nxt = D.n
    for e, (u, v) in enumerate(D.edges):
        prev = u
        for j in range(1, k):
            labels.append(f"{D.labels[u]}>{D.labels[v]}#{e}.{j}")
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, v))
    return Digraph(nxt, edges, labels)


def from_networkx(G) -> Digraph:
    nodes = list(G.nodes())
    pos = {v: i for i, v in enumerate(nodes)}
    return Digraph(len(nodes), [(pos[u], pos[v]) for u, v in G.edges()],
                   [str(v) for v in nodes])
