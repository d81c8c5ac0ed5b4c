"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from scmine import _backend


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cases(rng):
    ids_a = np.sort(rng.choice(4096, 800, replace=False)).astype(np.int64)
    ids_b = np.sort(rng.choice(4096, 800, replace=False)).astype(np.int64)
    w_a, w_b = rng.random(800), rng.random(800)
    yield "sparse_dot x200 (800 nnz)", lambda m: [m.sparse_dot(ids_a, w_a, ids_b, w_b) for _ in range(200)]

    raster = rng.integers(0, 256, (240, 320, 3), dtype=np.uint8)
    yield "quantize_counts 320x240", lambda m: m.quantize_counts(raster, 4)

    K, V, D, n = 5, 300, 100, 5000
    words = rng.integers(V, size=n).astype(np.int64)
    docs = np.sort(rng.integers(D, size=n)).astype(np.int64)
    z0 = rng.integers(K, size=n).astype(np.int64)
    uniforms = rng.random(n)

    def sweep(m):
        z = z0.copy()
        n_dk = np.zeros((D, K), np.int64)
        n_kw = np.zeros((K, V), np.int64)
        np.add.at(n_dk, (docs, z), 1)
        np.add.at(n_kw, (z, words), 1)
        m.gibbs_sweep(words, docs, z, n_dk, n_kw, n_kw.sum(axis=1), 10.0, 0.01, uniforms)

    yield "gibbs_sweep 5000 tokens K=5", sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _backend.compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for name, fn in cases(rng):
        fast = best_of(lambda: fn(_backend.compiled), args.repeat)
        slow = best_of(lambda: fn(_backend.fallback), args.repeat)
        print(f"{name:32} {fast * 1e3:10.3f}ms {slow * 1e3:10.3f}ms {slow / fast:8.1f}x")


if __name__ == "__main__":
    main()
