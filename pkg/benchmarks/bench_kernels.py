"""Timing comparison of the jit-compiled kernels against the numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 1e4,1e6 --repeat 9

The dispatch column reflects the active backend (numba unless
ISONETS_NO_NUMBA is set), the fallback column always times the pure numpy
implementations, so under the flag both columns agree.
"""

import argparse
import time

import numpy as np

from isonets import _kernels
from isonets._kernels import (
    _inv_np,
    _mul_np,
    _quad_ratio_np,
    _solve_fourth_np,
    backend,
    inv,
    mul,
    quad_ratio,
    solve_fourth,
    warmup,
)


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n, repeat, rng):
    a, b, c, d = rng.standard_normal((4, n, 4))
    r = rng.uniform(0.5, 2.0, size=n)
    cases = [
        ("mul", lambda: mul(a, b), lambda: _mul_np(a, b)),
        ("inv", lambda: inv(a), lambda: _inv_np(a)),
        ("quad_ratio", lambda: quad_ratio(a, b, c, d),
         lambda: _quad_ratio_np(a, b, c, d)),
        ("solve_fourth", lambda: solve_fourth(r, a, b, c),
         lambda: _solve_fourth_np(r, a, b, c)),
    ]
    rows = []
    for name, fast, slow in cases:
        t_fast = _time(fast, repeat)
        t_slow = _time(slow, repeat)
        rows.append((name, n, t_fast, t_slow, t_slow / t_fast))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1e3,1e5,1e6",
                        help="comma-separated batch sizes")
    parser.add_argument("--repeat", type=int, default=7,
                        help="repetitions per case, best time wins")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(float(s)) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    warmup()

    print(f"backend: {backend()}  (numba available: {_kernels.HAS_NUMBA})")
    header = f"{'kernel':<14}{'n':>9}  {'dispatch':>11}  {'numpy':>11}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        for name, n_, tf, ts, ratio in bench(n, args.repeat, rng):
            print(f"{name:<14}{n_:>9}  {tf * 1e3:>9.3f}ms  {ts * 1e3:>9.3f}ms  {ratio:>7.1f}x")
        print()


if __name__ == "__main__":
    main()
