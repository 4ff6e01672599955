"""Compare the numba and numpy kernel backends on representative sizes.

Usage: python benchmarks/bench_kernels.py [--sizes 400,800,1600]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from freeprob import _kernels


def best_of(fn, *args, repeats: int = 5) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="400,800,1600,3200",
                        help="comma-separated eigenvalue counts")
    parser.add_argument("--mc-samples", type=int, default=200_000,
                        help="rows for the Vandermonde moment kernel")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    _kernels.warmup()
    impls = _kernels.implementations()
    print(f"active backend: {_kernels.backend()}")
    print(f"{'kernel':<22} {'n':>6}  " +
          "  ".join(f"{name:>12}" for name in impls) + "  speedup")

    rng = np.random.default_rng(0)
    for n in sizes:
        vals = np.sort(rng.uniform(-2.0, 2.0, size=n))
        rows = {}
        for name, fns in impls.items():
            rows[name] = best_of(fns["pair_log_reg_sum"], vals, 0.1)
        ratio = rows["numpy"] / rows.get("numba", rows["numpy"])
        print(f"{'pair_log_reg_sum':<22} {n:>6}  " +
              "  ".join(f"{rows[name] * 1e3:>10.2f}ms" for name in impls) +
              f"  {ratio:>6.1f}x")

        for name, fns in impls.items():
            rows[name] = best_of(fns["pair_log_sq_skip"], vals)
        ratio = rows["numpy"] / rows.get("numba", rows["numpy"])
        print(f"{'pair_log_sq_skip':<22} {n:>6}  " +
              "  ".join(f"{rows[name] * 1e3:>10.2f}ms" for name in impls) +
              f"  {ratio:>6.1f}x")

    t = rng.uniform(-0.5, 0.5, size=(args.mc_samples, 4))
    rows = {name: best_of(fns["vandermonde_sq_moments"], t)
            for name, fns in impls.items()}
    ratio = rows["numpy"] / rows.get("numba", rows["numpy"])
    print(f"{'vandermonde_moments':<22} {t.shape[0]:>6}  " +
          "  ".join(f"{rows[name] * 1e3:>10.2f}ms" for name in impls) +
          f"  {ratio:>6.1f}x")


if __name__ == "__main__":
    main()
