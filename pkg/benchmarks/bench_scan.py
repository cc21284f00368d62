"""Compare the compiled x-scan kernel against the pure-Python fallback.

Usage: python benchmarks/bench_scan.py [--x-bound N] [--curves K]
"""

from __future__ import annotations

import argparse
import time

from integral_census import _scan_py
from integral_census.points import scan_backend_name

try:
    from integral_census import _scan
except ImportError:
    _scan = None


def bench(fn, curves, x_bound: int) -> tuple[float, int]:
    t0 = time.perf_counter()
    total = 0
    for a, b in curves:
        total += len(fn(a, b, -x_bound, x_bound))
    return time.perf_counter() - t0, total


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--x-bound", type=int, default=200000)
    ap.add_argument("--curves", type=int, default=40)
    args = ap.parse_args()

    curves = [(a, b) for a in range(-4, 4) for b in range(-3, 3)][: args.curves]
    print(f"backend available: {scan_backend_name()}")
    t_py, n_py = bench(_scan_py.scan_range, curves, args.x_bound)
    print(f"pure-python: {t_py:.3f} s  ({n_py} points)")
    if _scan is None:
        print("compiled kernel not built; skipping")
        return
    t_c, n_c = bench(_scan.scan_range, curves, args.x_bound)
    print(f"compiled:    {t_c:.3f} s  ({n_c} points)")
    assert n_py == n_c, "backends disagree on point counts"
    print(f"speedup: {t_py / t_c:.1f}x")


if __name__ == "__main__":
    main()
