"""Brute-force reference computations in plain Python.

Nothing here calls the numpy/numba machinery; the acceptance checks compare
the fast paths against these.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

BIG = float("inf")


def distances(n: int, edges) -> list[list[float]]:
    """Floyd-Warshall on unit arcs."""
    d = [[0 if i == j else BIG for j in range(n)] for i in range(n)]
    for u, v in edges:
        if u != v:
            d[u][v] = 1
    for k in range(n):
        for i in range(n):
            if d[i][k] == BIG:
                continue
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def geodesic_edge_sequences(n: int, edges, x: int, y: int) -> list[tuple[int, ...]]:
    """All x-y walks of length d(x, y), as sequences of edge ids (parallel copies distinct)."""
    d = distances(n, edges)
    if d[x][y] == BIG:
        return []
    target = int(d[x][y])
    out = []

    def walk(u, steps, used):
        if steps == target:
            if u == y:
                out.append(tuple(used))
            return
        for e, (a, b) in enumerate(edges):
            if a == u:
                walk(b, steps + 1, used + [e])

    walk(x, 0, [])
    return out


def geodesic_vertex_paths(n: int, edges, x: int, y: int) -> list[tuple[int, ...]]:
    seqs = geodesic_edge_sequences(n, edges, x, y)
    paths = set()
    for s in seqs:
        p = [x] + [edges[e][1] for e in s]
        paths.add(tuple(p))
    return sorted(paths)


def _sides(e, pattern):
    out = []
    for k in range(3):
        a, b = e[k], e[(k + 1) % 3]
        out.append((b, a) if pattern >> k & 1 else (a, b))
    return out


def triangle_defect(d, sides) -> float:
    """Thin defect: every valid choice of the sides holding P's start and end."""
    worst = 0
    for i, P in enumerate(sides):
        s, t = P[0], P[-1]
        others = [j for j in range(3) if j != i]
        valid = []
        for q in others:
            r = [j for j in others if j != q][0]
            if s in (sides[q][0], sides[q][-1]) and t in (sides[r][0], sides[r][-1]):
                valid.append((q, r))
        for q, r in valid:
            for p in P:
                from_q = min(d[a][p] for a in sides[q])
                to_r = min(d[p][b] for b in sides[r])
                worst = max(worst, min(from_q, to_r))
    return worst


def slim_defect(d, sides) -> float:
    """Each side must sit in both the out-ball and the in-ball of the other two."""
    worst = 0
    for i, P in enumerate(sides):
        rest = [v for j in range(3) if j != i for v in sides[j]]
        for p in P:
            worst = max(worst, min(d[a][p] for a in rest), min(d[p][b] for b in rest))
    return worst


def delta(n: int, edges, transitive_only: bool = False, slim: bool = False) -> float:
    """Largest defect over all triples x <= y <= z, patterns and geodesic sides."""
    d = distances(n, edges)
    cache = {}

    def geos(a, b):
        if (a, b) not in cache:
            cache[(a, b)] = geodesic_vertex_paths(n, edges, a, b)
        return cache[(a, b)]

    best = 0
    for x in range(n):
        for y in range(x, n):
            for z in range(y, n):
                for pat in range(8):
                    if transitive_only and pat in (0, 7):
                        continue
                    ends = _sides((x, y, z), pat)
                    if any(d[a][b] == BIG for a, b in ends):
                        continue
                    for s0 in geos(*ends[0]):
                        for s1 in geos(*ends[1]):
                            for s2 in geos(*ends[2]):
                                sides = (s0, s1, s2)
                                val = slim_defect(d, sides) if slim else triangle_defect(d, sides)
                                best = max(best, val)
    return best


def chain_distance(w) -> list[list]:
    """Cheapest chain by enumerating every ordered set of distinct intermediate points."""
    k = len(w)
    out = [[None] * k for _ in range(k)]
    for a in range(k):
        for b in range(k):
            if a == b:
                out[a][b] = 0 * w[a][b]
                continue
            best = w[a][b]
            rest = [c for c in range(k) if c not in (a, b)]
            for m in range(1, len(rest) + 1):
                for mid in permutations(rest, m):
                    chain = (a,) + mid + (b,)
                    cost = sum(w[chain[i]][chain[i + 1]] for i in range(len(chain) - 1))
                    if cost < best:
                        best = cost
            out[a][b] = best
    return out


def qi_holds(d1, d2, mapping, gamma, c) -> bool:
    """Direct double loop over pairs plus co-density, with exact rationals."""
    g, cc = Fraction(gamma), Fraction(c)
    n1, n2 = len(d1), len(d2)
    for x in range(n1):
        for y in range(n1):
            a, b = d1[x][y], d2[mapping[x]][mapping[y]]
            if a == BIG or b == BIG:
                if (a == BIG) != (b == BIG):
                    return False
                continue
            if Fraction(a) / g - cc > b or b > g * a + cc:
                return False
    image = set(mapping)
    for y in range(n2):
        if not any(d2[v][y] <= cc and d2[y][v] <= cc for v in image):
            return False
    return True


def semigroup_words_ball(r: int) -> int:
    """Elements of <a, b | aa = bb, ab = ba> of word length <= r.

    Both relations keep word length and the parity of the b-count, and the
    monoid is commutative with b^2 = a^2, so those two invariants classify
    elements.
    """
    seen = set()
    words = [""]
    for _ in range(r):
        words = [w + s for w in words for s in "ab"] + words
        words = list(set(words))
    for w in words:
        seen.add((len(w), w.count("b") % 2))
    return len(seen)
