"""Benchmark: compiled vs pure Python accumulation kernels.

Times the two hot kernels on a table-reproduction-sized workload (the
left fold of n small probability vectors, then the norm reduction) and
reports the speedup.  Both backends are imported directly, bypassing the
import-time selection, and their outputs are checked to agree exactly.

Usage: python benchmarks/bench_kernels.py [--n 400] [--repeat 3]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from convclose import _kernels_py

try:
    from convclose import _kernels
except ImportError:
    _kernels = None


def factor_vectors(n: int, d: int = 10) -> list:
    out = []
    for j in range(1, n + 1):
        q = 0.4 + 1.0 / (j + 9)
        out.append(
            np.array([math.comb(d, r) * q**r * (1 - q) ** (d - r) for r in range(d + 1)])
        )
    return out


def fold(backend, vectors) -> np.ndarray:
    acc = vectors[0]
    for v in vectors[1:]:
        acc = backend.line_conv(acc, v)
    return acc


def time_call(fn, repeat: int) -> float:
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=400, help="number of convolution factors")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    vectors = factor_vectors(args.n)
    results = {}
    backends = {"python": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels

    folded = {}
    for name, backend in backends.items():
        folded[name] = fold(backend, vectors)
        t_fold = time_call(lambda b=backend: fold(b, vectors), args.repeat)
        big = folded[name]
        t_norm = time_call(lambda b=backend: [b.abs_sum(big) for _ in range(50)], args.repeat)
        results[name] = (t_fold, t_norm)

    if len(folded) == 2 and not np.array_equal(folded["python"], folded["cython"]):
        print("WARNING: backends disagree!")
        return 1

    print(f"workload: fold of {args.n} vectors of length {len(vectors[0])}, "
          f"output length {len(next(iter(folded.values())))}; 50x norm reduction")
    print(f"{'backend':<10} {'fold (s)':>12} {'norm (s)':>12}")
    for name, (t_fold, t_norm) in results.items():
        print(f"{name:<10} {t_fold:>12.4f} {t_norm:>12.4f}")
    if len(results) == 2:
        sp_fold = results["python"][0] / results["cython"][0]
        sp_norm = results["python"][1] / results["cython"][1]
        print(f"speedup: fold {sp_fold:.1f}x, norm {sp_norm:.1f}x")
    else:
        print("compiled backend not available; built only the pure numbers")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
