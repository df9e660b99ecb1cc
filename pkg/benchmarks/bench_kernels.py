"""Time the numba kernels against the numpy fallback on grids and random graphs.

    python3 benchmarks/bench_kernels.py [--sizes 20,40,60] [--repeat 3]
"""

import argparse
import time

import numpy as np

from bakertw import _kernels
from bakertw.families import grid, random_bounded_degree


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="20,40,60")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _kernels.NUMBA_KERNELS:
        print("numba is not installed; only the numpy path is available")
        return 1
    print(f"{'graph':<16}{'kernel':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for side in (int(x) for x in args.sizes.split(",")):
        for name, g in ((f"grid({side})", grid(side)),
                        (f"rbd({side * side},3)", random_bounded_degree(side * side, 3, args.seed))):
            indptr, indices = g.csr()
            n = g.n
            labels = np.arange(n, dtype=np.int64) % max(n // 8, 1)
            k = int(labels.max()) + 1
            dm = _kernels.NUMPY_KERNELS["distance_matrix"](indptr, indices, n)
            cases = {
                "bfs_distances": lambda K: K["bfs_distances"](indptr, indices, np.array([0]), n),
                "distance_matrix": lambda K: K["distance_matrix"](indptr, indices, n),
                "girth": lambda K: K["girth"](indptr, indices, n),
                "label_min_distances": lambda K: K["label_min_distances"](dm, labels, k),
            }
            for kernel, call in cases.items():
                call(_kernels.NUMBA_KERNELS)  # compile outside the timing
                t_nb, a = _best(lambda: call(_kernels.NUMBA_KERNELS), args.repeat)
                t_np, b = _best(lambda: call(_kernels.NUMPY_KERNELS), args.repeat)
                assert np.array_equal(np.asarray(a), np.asarray(b)), f"{kernel} disagrees on {name}"
                print(f"{name:<16}{kernel:<22}{t_nb:>10.4f}{t_np:>10.4f}{t_np / max(t_nb, 1e-9):>9.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
