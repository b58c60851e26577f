"""Compare the compiled and pure-Python tridiagonal kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 8 32 128 512] [--repeat 3]

Times bisection (all eigenvalues) and inverse iteration (all eigenvectors)
on random chains, reports the best of ``--repeat`` runs per backend and the
speed-up, and checks that both backends return the same eigenvalues.
"""
import argparse
import time

import numpy as np

from pstchain import kernels


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[8, 32, 128, 512])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=7)
    args = p.parse_args(argv)

    py = kernels.get_backend("python")
    try:
        cc = kernels.get_backend("compiled")
    except ImportError:
        cc = None
        print("compiled extension not built; timing the Python kernels only")

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>6} {'stage':>10} {'python [s]':>12} {'compiled [s]':>13} {'speed-up':>9}")
    for n in args.sizes:
        d = rng.uniform(-2, 2, n)
        e = rng.uniform(0.5, 1.5, n - 1)
        vals = py.bisect_eigenvalues(d, e)
        stages = [
            ("bisect", lambda b: b.bisect_eigenvalues(d, e)),
            ("inverse", lambda b: b.inverse_iteration(d, e, vals)),
        ]
        for name, fn in stages:
            tp = best_time(lambda: fn(py), args.repeat)
            if cc is None:
                print(f"{n:>6} {name:>10} {tp:>12.4e} {'-':>13} {'-':>9}")
                continue
            tc = best_time(lambda: fn(cc), args.repeat)
            print(f"{n:>6} {name:>10} {tp:>12.4e} {tc:>13.4e} {tp / tc:>8.1f}x")
        if cc is not None and not np.array_equal(vals, cc.bisect_eigenvalues(d, e)):
            raise SystemExit(f"backends disagree on eigenvalues at n={n}")


if __name__ == "__main__":
    main()
