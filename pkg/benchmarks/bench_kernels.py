"""Benchmark the jitted worst-pair suitability scan against the pure-numpy
fallback.

Run:  python3 benchmarks/bench_kernels.py
The env flag LOCLAB_NUMBA=0 forces the fallback package-wide; here both
paths are timed side by side in one process.
"""

import time

import numpy as np

from loclab import _kernels


def bench(n, d, repeats=3):
    rng = np.random.default_rng(0)
    absG = np.abs(rng.standard_normal((n, n)))
    absG = (absG + absG.T) / 2
    coords = rng.integers(-n // 2, n // 2 + 1, size=(n, d)).astype(np.int64)
    r, gamma = max(1, n // 20), 100.0 / n  # keeps exp(gamma*dist) finite

    def timed(fn):
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = fn(absG, coords, r, gamma)
            best = min(best, time.perf_counter() - t0)
        return best, out

    t_np, out_np = timed(_kernels._worst_pair_numpy)
    if _kernels.HAS_NUMBA:
        _kernels.worst_pair_scan(absG[:8, :8], coords[:8], r, gamma)  # warm
        t_nb, out_nb = timed(_kernels.worst_pair_scan)
        assert abs(out_np[0] - out_nb[0]) <= 1e-12 * max(1.0, abs(out_np[0]))
    else:
        t_nb = float("nan")
    return t_np, t_nb


def main():
    print(f"numba available: {_kernels.HAS_NUMBA}")
    print(f"{'N':>6} {'d':>2} {'numpy (ms)':>12} {'numba (ms)':>12} "
          f"{'speedup':>8}")
    for n, d in ((200, 1), (800, 1), (2000, 1), (500, 2), (1500, 2)):
        t_np, t_nb = bench(n, d)
        ratio = t_np / t_nb if t_nb == t_nb else float("nan")
        print(f"{n:>6} {d:>2} {t_np * 1e3:>12.2f} {t_nb * 1e3:>12.2f} "
              f"{ratio:>8.1f}x")


if __name__ == "__main__":
    main()
