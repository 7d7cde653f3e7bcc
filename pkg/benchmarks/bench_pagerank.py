#!/usr/bin/env python3
"""Benchmark the compiled propagation kernel against the NumPy fallback.

Usage: python benchmarks/bench_pagerank.py [--sizes 1000,10000,50000]

Builds random undirected graphs (average degree ~8), runs both backends
to convergence at theta=0.5, and reports per-call times plus the largest
score disagreement between the two implementations.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from scholarank._kernels._pagerank_py import power_iterate as py_kernel  # noqa: E402

try:
    from scholarank._kernels._pagerank_cy import power_iterate as cy_kernel  # noqa: E402
except ImportError:
    cy_kernel = None


def random_csr(n: int, avg_degree: int, seed: int):
    rng = random.Random(seed)
    neighbors = [set() for _ in range(n)]
    for _ in range(n * avg_degree // 2):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            neighbors[a].add(b)
            neighbors[b].add(a)
    indptr = np.zeros(n + 1, dtype=np.int64)
    chunks = []
    for i, row in enumerate(neighbors):
        ordered = np.fromiter(sorted(row), dtype=np.int64, count=len(row))
        chunks.append(ordered)
        indptr[i + 1] = indptr[i] + ordered.size
    return indptr, np.concatenate(chunks)


def best_of(runs: int, fn, *args):
    best = float("inf")
    result = None
    for _ in range(runs):
        started = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - started)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,10000,50000")
    parser.add_argument("--theta", type=float, default=0.5)
    parser.add_argument("--runs", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"theta={args.theta}, tolerance=1e-10, best of {args.runs} runs")
    header = f"{'nodes':>8} {'edges':>9} {'iters':>6} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8} {'max diff':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        indptr, indices = random_csr(n, avg_degree=8, seed=n)
        teleport = np.full(n, 1.0 / n)
        py_time, (py_scores, iters, _, ok) = best_of(
            args.runs, py_kernel, indptr, indices, teleport, args.theta, 1e-10, 500
        )
        assert ok, "numpy backend did not converge"
        if cy_kernel is None:
            print(f"{n:>8} {indices.size // 2:>9} {iters:>6} {py_time * 1e3:>10.2f} {'n/a':>10}")
            continue
        cy_time, (cy_scores, cy_iters, _, cy_ok) = best_of(
            args.runs, cy_kernel, indptr, indices, teleport, args.theta, 1e-10, 500
        )
        assert cy_ok, "compiled backend did not converge"
        diff = float(np.max(np.abs(py_scores - cy_scores)))
        print(
            f"{n:>8} {indices.size // 2:>9} {iters:>6} {py_time * 1e3:>10.2f} "
            f"{cy_time * 1e3:>10.2f} {py_time / cy_time:>8.2f} {diff:>10.2e}"
        )
    if cy_kernel is None:
        print("\ncompiled kernel not built; run: python setup.py build_ext --inplace")
    return 0


if __name__ == "__main__":
    sys.exit(main())
