"""Time the numba and numpy discrepancy backends on the same batches.

Usage: python benchmarks/bench_kernels.py [--repeats 5]

For each (a, n, d) batch shape the script checks that both backends agree
to 1e-12 and reports the best-of-repeats wall time and the speedup.  The
first numba call is excluded from timing (JIT compile or cache load).
"""

import argparse
import time

import numpy as np

from sfsfd import _kernels

SHAPES = [(1, 100, 5), (20, 100, 20), (50, 100, 30), (50, 300, 30), (10, 500, 30)]


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if not _kernels.HAS_NUMBA:
        print("numba is not installed; only the numpy backend is available")
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'a':>4} {'n':>5} {'d':>4} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8} {'max diff':>9}")
    for a, n, d in SHAPES:
        designs = rng.random((a, n, d))
        ref = _kernels.cd2_batch(designs, backend="numpy")
        fast = _kernels.cd2_batch(designs, backend="numba")  # warm-up
        diff = float(np.max(np.abs(ref - fast)))
        if diff > 1e-12:
            raise SystemExit(f"backends disagree by {diff:.3e} at a={a}, n={n}, d={d}")
        t_np = best_time(lambda: _kernels.cd2_batch(designs, backend="numpy"), args.repeats)
        t_nb = best_time(lambda: _kernels.cd2_batch(designs, backend="numba"), args.repeats)
        print(f"{a:>4} {n:>5} {d:>4} {t_np:>11.4f} {t_nb:>11.4f} {t_np / t_nb:>7.1f}x {diff:>9.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
