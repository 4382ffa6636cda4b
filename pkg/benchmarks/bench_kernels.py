"""Compare the numba kernels with their numpy fallbacks.

Run ``python benchmarks/bench_kernels.py``.  Each kernel is checked for
agreement once, warmed up (so numba compilation is not timed) and then
timed with ``timeit``; the table reports the best of several repeats.
"""

import argparse
import timeit

import numpy as np

from graphstar import _kernels
from graphstar.correspondence import path_basis
from graphstar.graph import bouquet_union, from_adjacency


def cases(seed: int):
    rng = np.random.default_rng(seed)
    D = rng.integers(0, 3, size=(40, 40)).astype(np.float64)
    x0 = np.full(40, 1 / 40)
    yield "power_iterate 40x40", _kernels.power_iterate_nb, _kernels.power_iterate_np, (D, x0, 1e-12, 10000)

    ring = np.zeros((7, 7), dtype=np.int64)
    for i in range(7):
        ring[i, (i + 1) % 7] = ring[i, (i + 3) % 7] = 1
    yield "vertex_automorphisms 7-vertex circulant", _kernels.vertex_automorphisms_nb, _kernels.vertex_automorphisms_np, (ring,)

    g = bouquet_union(3, 2)
    ptr, edges = g.out_csr
    paths = path_basis(g, 6)
    yield f"extend_paths {len(paths)} paths", _kernels.extend_paths_nb, _kernels.extend_paths_np, (paths, g.dst, ptr, edges)

    g = from_adjacency(rng.integers(0, 2, size=(6, 6)) + np.eye(6, dtype=int))
    ptr, edges = g.out_csr
    paths = path_basis(g, 4)
    yield f"extend_paths {len(paths)} paths, random graph", _kernels.extend_paths_nb, _kernels.extend_paths_np, (paths, g.dst, ptr, edges)


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim == 2 and a.dtype.kind == "i":
        a, b = a[np.lexsort(a.T[::-1])], b[np.lexsort(b.T[::-1])]
    return a.shape == b.shape and np.allclose(a, b, atol=1e-9)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'kernel':45s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for label, nb, np_, call_args in cases(args.seed):
        if not same(nb(*call_args), np_(*call_args)):
            raise SystemExit(f"{label}: numba and numpy results differ")
        times = []
        for fn in (nb, np_):
            best = min(timeit.repeat(lambda: fn(*call_args), repeat=args.repeat, number=args.number))
            times.append(1e3 * best / args.number)
        print(f"{label:45s} {times[0]:10.3f} {times[1]:10.3f} {times[1] / times[0]:7.1f}x")


if __name__ == "__main__":
    main()
