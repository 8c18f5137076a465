"""Benchmark the numba and numpy BFS kernels on random CSR graphs.

Runs both implementations on identical graphs, checks they agree, and prints
one table row per graph size. When numba is unavailable or disabled via
OPENREL_NO_NUMBA the jitted column falls back to numpy and the speedup
column is meaningless; the header warns in that case.

Usage: python3 benchmarks/bench_bfs.py [--quick] [--seed N]
"""

import argparse
import time

import numpy as np

from openrel import accel


def random_csr(rng: np.random.Generator, n_nodes: int, avg_degree: int):
    m = n_nodes * avg_degree
    heads = np.sort(rng.integers(0, n_nodes, m))
    dst = rng.integers(0, n_nodes, m).astype(np.int64)
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    np.cumsum(np.bincount(heads, minlength=n_nodes), out=indptr[1:])
    return indptr, np.ascontiguousarray(dst)


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_size(rng, n_nodes: int, avg_degree: int, max_hops: int, repeats: int):
    indptr, dst = random_csr(rng, n_nodes, avg_degree)
    sources = rng.integers(0, n_nodes, 8)

    def run_active():
        for s in sources:
            accel.bfs_distances(indptr, dst, int(s), max_hops)

    def run_numpy():
        for s in sources:
            accel.bfs_distances_numpy(indptr, dst, int(s), max_hops)

    for s in sources:
        a = accel.bfs_distances(indptr, dst, int(s), max_hops)
        b = accel.bfs_distances_numpy(indptr, dst, int(s), max_hops)
        if not np.array_equal(a, b):
            raise SystemExit(f"backend disagreement at n={n_nodes} source={int(s)}")

    run_active()  # warm the jit cache before timing
    active = time_call(run_active, repeats=repeats)
    plain = time_call(run_numpy, repeats=repeats)
    return active, plain


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="small graphs only")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-hops", type=int, default=6)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    sizes = [(1_000, 8), (10_000, 16)]
    if not args.quick:
        sizes.append((100_000, 16))

    backend = accel.backend_name()
    print(f"active backend: {backend}")
    if backend != "numba":
        print("warning: numba inactive, both columns run the numpy kernel")
    print(f"{'nodes':>8} {'degree':>6} {backend + ' s':>12} {'numpy s':>12} {'speedup':>8}")

    rng = np.random.default_rng(args.seed)
    for n_nodes, avg_degree in sizes:
        active, plain = bench_size(rng, n_nodes, avg_degree, args.max_hops, args.repeats)
        print(
            f"{n_nodes:>8} {avg_degree:>6} {active:>12.5f} {plain:>12.5f} {plain / active:>8.2f}"
        )


if __name__ == "__main__":
    main()
