"""Hot loops: all-pairs BFS, per-geodesic distance vectors, triangle scans.

Each kernel exists twice, once compiled with numba and once in plain numpy.
The numba versions are used unless numba is missing or the environment
variable ``DIRHYP_DISABLE_NUMBA`` is set to a non-empty value other than "0".
Both versions visit triangles in the same order and break ties the same way,
so they return identical witnesses.

Unreachable entries are stored as ``FAR`` inside these arrays only; the public
API converts them to ``INF`` before anything leaves the package.
"""

from __future__ import annotations

import os

import numpy as np

FAR = 1 << 30

# scan kinds
THIN, SLIM, BOUNDS = 0, 1, 2

# witness row layout: x, y, z, pattern, g0, g1, g2
WIT_WIDTH = 7

try:
    import numba as nb
    # workqueue avoids the TBB version warning and needs no extra runtime
    nb.config.THREADING_LAYER = "workqueue"
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None
    _HAVE_NUMBA = False


def _numba_requested() -> bool:
    flag = os.environ.get("DIRHYP_DISABLE_NUMBA", "")
    return flag in ("", "0")


USE_NUMBA = _HAVE_NUMBA and _numba_requested()


# ---------------------------------------------------------------------------
# numpy reference implementations


def bfs_all_pairs_np(indptr, indices, n):
    """Level-synchronous BFS from every source at once (dense boolean algebra)."""
    dist = np.full((n, n), FAR, dtype=np.int64)
    if n == 0:
        return dist
    adj = np.zeros((n, n), dtype=bool)
    for u in range(n):
        adj[u, indices[indptr[u]:indptr[u + 1]]] = True
    reached = np.eye(n, dtype=bool)
    frontier = reached.copy()
    np.fill_diagonal(dist, 0)
    level = 0
    while frontier.any():
        level += 1
        nxt = (frontier.astype(np.int32) @ adj.astype(np.int32)) > 0
        nxt &= ~reached
        dist[nxt] = level
        reached |= nxt
        frontier = nxt
    return dist


def geodesic_vectors_np(dist, geo_start, geo_len, geo_verts):
    g = len(geo_start)
    n = dist.shape[0]
    outv = np.empty((g, n), dtype=np.int32)
    inv = np.empty((g, n), dtype=np.int32)
    for k in range(g):
        vs = geo_verts[geo_start[k]:geo_start[k] + geo_len[k]]
        outv[k] = dist[vs, :].min(axis=0)
        inv[k] = dist[:, vs].min(axis=1)
    return outv, inv


def _side_ends_np(x, y, z, pat):
    tri = (x, y, z)
    s = [0, 0, 0]
    e = [0, 0, 0]
    for k in range(3):
        a, b = tri[k], tri[(k + 1) % 3]
        if (pat >> k) & 1:
            s[k], e[k] = b, a
        else:
            s[k], e[k] = a, b
    return s, e


def _verts_np(g, geo_start, geo_len, geo_verts):
    return geo_verts[geo_start[g]:geo_start[g] + geo_len[g]]


def _thin_np(gs, s, e, geo_start, geo_len, geo_verts, outv, inv):
    best = 0
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        for q, r in ((j, k), (k, j)):
            if (s[i] == s[q] or s[i] == e[q]) and (e[i] == s[r] or e[i] == e[r]):
                ps = _verts_np(gs[i], geo_start, geo_len, geo_verts)
                m = int(np.minimum(outv[gs[q], ps], inv[gs[r], ps]).max())
                if m > best:
                    best = m
    return best


def _slim_np(gs, s, e, geo_start, geo_len, geo_verts, outv, inv):
    best = 0
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        ps = _verts_np(gs[i], geo_start, geo_len, geo_verts)
        m_out = int(np.minimum(outv[gs[j], ps], outv[gs[k], ps]).max())
        m_in = int(np.minimum(inv[gs[j], ps], inv[gs[k], ps]).max())
        best = max(best, m_out, m_in)
    return best


def _bounds_np(gs, s, e, geo_start, geo_len, geo_verts, outv, inv, params):
    eps, f_eps, g_eps, radius = params[0], params[1], params[2], params[3]
    code = 0
    lens = [int(geo_len[g]) - 1 for g in gs]
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        for q, r in ((j, k), (k, j)):
            if (s[i] == s[q] or s[i] == e[q]) and (e[i] == s[r] or e[i] == e[r]):
                if eps * lens[i] > lens[q] * f_eps + lens[r] * g_eps:
                    code |= 1
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            if e[i] == s[j] and s[k] == s[i] and e[k] == e[j]:
                vs = _verts_np(gs[k], geo_start, geo_len, geo_verts)
                near_out = np.minimum(outv[gs[i], vs], outv[gs[j], vs])
                near_in = np.minimum(inv[gs[i], vs], inv[gs[j], vs])
                if (near_out > radius).any() or (near_in > radius).any():
                    code |= 2
    return code


def _eval_triple_np(x, y, z, patterns, kind, pair_first, pair_cnt, geo_start,
                    geo_len, geo_verts, outv, inv, params, best, wit):
    count = 0
    for pat in patterns:
        s, e = _side_ends_np(x, y, z, int(pat))
        c = [int(pair_cnt[s[k], e[k]]) for k in range(3)]
        if c[0] == 0 or c[1] == 0 or c[2] == 0:
            continue
        f = [int(pair_first[s[k], e[k]]) for k in range(3)]
        for a in range(c[0]):
            for b in range(c[1]):
                for d in range(c[2]):
                    gs = (f[0] + a, f[1] + b, f[2] + d)
                    count += 1
                    if kind == THIN:
                        v = _thin_np(gs, s, e, geo_start, geo_len, geo_verts, outv, inv)
                    elif kind == SLIM:
                        v = _slim_np(gs, s, e, geo_start, geo_len, geo_verts, outv, inv)
                    else:
                        v = _bounds_np(gs, s, e, geo_start, geo_len, geo_verts, outv, inv, params)
                    if v > best:
                        best = v
                        wit[:] = (x, y, z, pat, gs[0], gs[1], gs[2])
    return best, count


def scan_all_np(verts, patterns, kind, pair_first, pair_cnt, geo_start, geo_len,
                geo_verts, outv, inv, params):
    """Max of the triangle score over every multiset {x <= y <= z} of ``verts``."""
    best = -1
    wit = np.zeros(WIT_WIDTH, dtype=np.int64)
    row = np.zeros(WIT_WIDTH, dtype=np.int64)
    total = 0
    m = len(verts)
    for ix in range(m):
        for iy in range(ix, m):
            for iz in range(iy, m):
                b, c = _eval_triple_np(int(verts[ix]), int(verts[iy]), int(verts[iz]),
                                       patterns, kind, pair_first, pair_cnt, geo_start,
                                       geo_len, geo_verts, outv, inv, params, best, row)
                total += c
                if b > best:
                    best = b
                    wit[:] = row
    return best, wit, total


def scan_triples_np(triples, patterns, kind, pair_first, pair_cnt, geo_start, geo_len,
                    geo_verts, outv, inv, params):
    best = -1
    wit = np.zeros(WIT_WIDTH, dtype=np.int64)
    row = np.zeros(WIT_WIDTH, dtype=np.int64)
    total = 0
    for t in range(len(triples)):
        x, y, z = (int(v) for v in triples[t])
        b, c = _eval_triple_np(x, y, z, patterns, kind, pair_first, pair_cnt, geo_start,
                               geo_len, geo_verts, outv, inv, params, best, row)
        total += c
        if b > best:
            best = b
            wit[:] = row
    return best, wit, total


# ---------------------------------------------------------------------------
# numba implementations

if _HAVE_NUMBA:

    @nb.njit(cache=True)
    def bfs_all_pairs_nb(indptr, indices, n):
        dist = np.full((n, n), FAR, dtype=np.int64)
        queue = np.empty(max(n, 1), dtype=np.int64)
        for src in range(n):
            dist[src, src] = 0
            queue[0] = src
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[src, u] + 1
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if dist[src, v] == FAR:
                        dist[src, v] = du
                        queue[tail] = v
                        tail += 1
        return dist

    @nb.njit(cache=True)
    def geodesic_vectors_nb(dist, geo_start, geo_len, geo_verts):
        g = len(geo_start)
        n = dist.shape[0]
        outv = np.full((g, n), FAR, dtype=np.int32)
        inv = np.full((g, n), FAR, dtype=np.int32)
        for k in range(g):
            for t in range(geo_start[k], geo_start[k] + geo_len[k]):
                q = geo_verts[t]
                for v in range(n):
                    a = dist[q, v]
                    if a < outv[k, v]:
                        outv[k, v] = a
                    b = dist[v, q]
                    if b < inv[k, v]:
                        inv[k, v] = b
        return outv, inv

    @nb.njit(cache=True)
    def _thin_nb(g0, g1, g2, s, e, geo_start, geo_len, geo_verts, outv, inv):
        gs = (g0, g1, g2)
        best = 0
        for i in range(3):
            j = (i + 1) % 3
            k = (i + 2) % 3
            for swap in range(2):
                q = j if swap == 0 else k
                r = k if swap == 0 else j
                if (s[i] == s[q] or s[i] == e[q]) and (e[i] == s[r] or e[i] == e[r]):
                    gp = gs[i]
                    gq = gs[q]
                    gr = gs[r]
                    m = 0
                    for t in range(geo_start[gp], geo_start[gp] + geo_len[gp]):
                        p = geo_verts[t]
                        a = outv[gq, p]
                        b = inv[gr, p]
                        v = a if a < b else b
                        if v > m:
                            m = v
                    if m > best:
                        best = m
        return best

    @nb.njit(cache=True)
    def _slim_nb(g0, g1, g2, s, e, geo_start, geo_len, geo_verts, outv, inv):
        gs = (g0, g1, g2)
        best = 0
        for i in range(3):
            gj = gs[(i + 1) % 3]
            gk = gs[(i + 2) % 3]
            gp = gs[i]
            for t in range(geo_start[gp], geo_start[gp] + geo_len[gp]):
                p = geo_verts[t]
                a = outv[gj, p]
                b = outv[gk, p]
                v = a if a < b else b
                if v > best:
                    best = v
                a = inv[gj, p]
                b = inv[gk, p]
                v = a if a < b else b
                if v > best:
                    best = v
        return best

    @nb.njit(cache=True)
    def _bounds_nb(g0, g1, g2, s, e, geo_start, geo_len, geo_verts, outv, inv, params):
        gs = (g0, g1, g2)
        eps = params[0]
        f_eps = params[1]
        g_eps = params[2]
        radius = params[3]
        code = 0
        for i in range(3):
            j = (i + 1) % 3
            k = (i + 2) % 3
            for swap in range(2):
                q = j if swap == 0 else k
                r = k if swap == 0 else j
                if (s[i] == s[q] or s[i] == e[q]) and (e[i] == s[r] or e[i] == e[r]):
                    lp = geo_len[gs[i]] - 1
                    lq = geo_len[gs[q]] - 1
                    lr = geo_len[gs[r]] - 1
                    if eps * lp > lq * f_eps + lr * g_eps:
                        code |= 1
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                k = 3 - i - j
                if e[i] == s[j] and s[k] == s[i] and e[k] == e[j]:
                    gk = gs[k]
                    for t in range(geo_start[gk], geo_start[gk] + geo_len[gk]):
                        v = geo_verts[t]
                        a = outv[gs[i], v]
                        b = outv[gs[j], v]
                        near_out = a if a < b else b
                        a = inv[gs[i], v]
                        b = inv[gs[j], v]
                        near_in = a if a < b else b
                        if near_out > radius or near_in > radius:
                            code |= 2
        return code

    @nb.njit(cache=True)
    def _eval_triple_nb(x, y, z, patterns, kind, pair_first, pair_cnt, geo_start,
                        geo_len, geo_verts, outv, inv, params, best, wit):
        s = np.empty(3, dtype=np.int64)
        e = np.empty(3, dtype=np.int64)
        count = 0
        for pi in range(len(patterns)):
            pat = patterns[pi]
            for k in range(3):
                a = x if k == 0 else (y if k == 1 else z)
                kk = (k + 1) % 3
                b = x if kk == 0 else (y if kk == 1 else z)
                if (pat >> k) & 1:
                    s[k] = b
                    e[k] = a
                else:
                    s[k] = a
                    e[k] = b
            c0 = pair_cnt[s[0], e[0]]
            c1 = pair_cnt[s[1], e[1]]
            c2 = pair_cnt[s[2], e[2]]
            if c0 == 0 or c1 == 0 or c2 == 0:
                continue
            f0 = pair_first[s[0], e[0]]
            f1 = pair_first[s[1], e[1]]
            f2 = pair_first[s[2], e[2]]
            for a in range(c0):
                for b in range(c1):
                    for d in range(c2):
                        count += 1
                        if kind == 0:
                            v = _thin_nb(f0 + a, f1 + b, f2 + d, s, e, geo_start,
                                         geo_len, geo_verts, outv, inv)
                        elif kind == 1:
                            v = _slim_nb(f0 + a, f1 + b, f2 + d, s, e, geo_start,
                                         geo_len, geo_verts, outv, inv)
                        else:
                            v = _bounds_nb(f0 + a, f1 + b, f2 + d, s, e, geo_start,
                                           geo_len, geo_verts, outv, inv, params)
                        if v > best:
                            best = v
                            wit[0] = x
                            wit[1] = y
                            wit[2] = z
                            wit[3] = pat
                            wit[4] = f0 + a
                            wit[5] = f1 + b
                            wit[6] = f2 + d
        return best, count

    @nb.njit(cache=True, parallel=True)
    def scan_all_nb(verts, patterns, kind, pair_first, pair_cnt, geo_start, geo_len,
                    geo_verts, outv, inv, params):
        m = len(verts)
        bests = np.full(m, -1, dtype=np.int64)
        wits = np.zeros((m, WIT_WIDTH), dtype=np.int64)
        counts = np.zeros(m, dtype=np.int64)
        for ix in nb.prange(m):
            local_best = -1
            row = np.zeros(WIT_WIDTH, dtype=np.int64)
            local_total = 0
            for iy in range(ix, m):
                for iz in range(iy, m):
                    local_best, c = _eval_triple_nb(verts[ix], verts[iy], verts[iz],
                                                    patterns, kind, pair_first, pair_cnt,
                                                    geo_start, geo_len, geo_verts, outv,
                                                    inv, params, local_best, row)
                    local_total += c
            bests[ix] = local_best
            wits[ix, :] = row
            counts[ix] = local_total
        best = -1
        wit = np.zeros(WIT_WIDTH, dtype=np.int64)
        for ix in range(m):
            if bests[ix] > best:
                best = bests[ix]
                wit[:] = wits[ix]
        return best, wit, counts.sum()

    @nb.njit(cache=True)
    def scan_triples_nb(triples, patterns, kind, pair_first, pair_cnt, geo_start, geo_len,
                        geo_verts, outv, inv, params):
        best = -1
        wit = np.zeros(WIT_WIDTH, dtype=np.int64)
        total = 0
        for t in range(triples.shape[0]):
            best, c = _eval_triple_nb(triples[t, 0], triples[t, 1], triples[t, 2],
                                      patterns, kind, pair_first, pair_cnt, geo_start,
                                      geo_len, geo_verts, outv, inv, params, best, wit)
            total += c
        return best, wit, total


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def bfs_all_pairs(indptr, indices, n):
    if USE_NUMBA:
        return bfs_all_pairs_nb(indptr, indices, n)
    return bfs_all_pairs_np(indptr, indices, n)


def geodesic_vectors(dist, geo_start, geo_len, geo_verts):
    if len(geo_start) == 0:
        n = dist.shape[0]
        return np.zeros((0, n), np.int32), np.zeros((0, n), np.int32)
    if USE_NUMBA:
        return geodesic_vectors_nb(dist, geo_start, geo_len, geo_verts)
    return geodesic_vectors_np(dist, geo_start, geo_len, geo_verts)


def scan_all(*args):
    if USE_NUMBA:
        best, wit, total = scan_all_nb(*args)
    else:
        best, wit, total = scan_all_np(*args)
    return int(best), wit, int(total)


def scan_triples(*args):
    if USE_NUMBA:
        best, wit, total = scan_triples_nb(*args)
    else:
        best, wit, total = scan_triples_np(*args)
    return int(best), wit, int(total)
