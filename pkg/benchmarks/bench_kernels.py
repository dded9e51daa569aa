"""Time the numba kernels against their numpy twins on identical inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Each kernel is called once to trigger compilation, then timed with the best of
N runs.  Outputs of both backends are compared for equality before timing.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from dirhyp import _kernels as K
from dirhyp import hyperbolicity as hy
from dirhyp.criteria import random_digraph
from dirhyp.families import realize


def _best_of(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def workloads():
    rng = np.random.default_rng(1)
    big = random_digraph(rng, 400)
    while big.n < 300:
        big = random_digraph(rng, 400)
    _, _, indptr, indices = big._csr
    yield "bfs_all_pairs", (K.bfs_all_pairs_np, K.bfs_all_pairs_nb), (indptr, indices, big.n), \
        f"random digraph n={big.n} m={len(big.edges)}"

    for fam, n in (("ex16_5", 5), ("ex7_4", 4)):
        D = realize(fam, n).digraph
        store = hy.GeodesicStore(D)
        raw = D.distances.raw
        yield "geodesic_vectors", (K.geodesic_vectors_np, K.geodesic_vectors_nb), \
            (raw, store.geo_start, store.geo_len, store.geo_verts), \
            f"{fam} n={n}, {len(store.geo_start)} geodesics"
        args = (np.arange(D.n, dtype=np.int64), np.arange(8, dtype=np.int64), K.THIN,
                *store.kernel_args(), np.zeros(4, dtype=np.int64))
        yield "scan_all thin", (K.scan_all_np, K.scan_all_nb), args, f"{fam} n={n}, |V|={D.n}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    opts = ap.parse_args()
    if not K._HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    rows = []
    for name, (np_fn, nb_fn), args, note in workloads():
        nb_out = nb_fn(*args)
        np_out = np_fn(*args)
        agree = _same(nb_out, np_out)
        t_nb = _best_of(nb_fn, args, opts.repeat)
        t_np = _best_of(np_fn, args, max(1, opts.repeat // 3))
        rows.append({"kernel": name, "input": note, "numpy_s": round(t_np, 4),
                     "numba_s": round(t_nb, 4), "speedup": round(t_np / t_nb, 1),
                     "agree": agree})
    if opts.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'kernel':18} {'input':38} {'numpy s':>9} {'numba s':>9} {'speedup':>8} agree")
    for r in rows:
        print(f"{r['kernel']:18} {r['input']:38} {r['numpy_s']:9.4f} {r['numba_s']:9.4f} "
              f"{r['speedup']:8.1f} {r['agree']}")


if __name__ == "__main__":
    main()
