"""Timing comparison: compiled kernels vs the pure NumPy fallback.

Runs each kernel on representative workloads and prints a table with the
speedup. Both backends are imported directly, so this works regardless of
which one the package selected at import.

Usage: python benchmarks/bench_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from lasszero._kernels import _pykernels

try:
    from lasszero._kernels import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _instance(seed, n, p):
    rng = np.random.default_rng(seed)
    X = np.asfortranarray(rng.standard_normal((n, p)))
    beta = rng.uniform(-1, 1, p) * (rng.random(p) < 0.3)
    y = X @ beta + 0.3 * rng.standard_normal(n)
    return X, y


def bench_cd(mod, n, p, lam_ratio, repeats):
    X, y = _instance(0, n, p)
    lam = lam_ratio * float(np.max(np.abs(X.T @ y)))

    def run():
        beta = np.zeros(p)
        mod.cd_fit(X, y.copy(), lam, beta, 10_000, 1e-8)

    return _time(run, repeats)


def bench_stepwise(mod, n, p, repeats):
    X, y = _instance(1, n, p)
    G = X.T @ X
    c = X.T @ y
    yty = float(y @ y)
    sup = np.arange(0, p, 2, dtype=np.intp)
    lam = 0.02 * float(np.max(np.abs(c)))

    def run():
        mod.stepwise_search(G, c, yty, lam, sup, 1e-10, 10 * p, 1e-10)

    return _time(run, repeats)


def bench_best_subset(mod, n, p, repeats):
    X, y = _instance(2, n, p)
    G = X.T @ X
    c = X.T @ y
    yty = float(y @ y)
    lam = 0.05 * float(np.max(np.abs(c)))

    def run():
        mod.best_subset(G, c, yty, lam, 1e-10)

    return _time(run, repeats)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    args = ap.parse_args()

    if _ckernels is None:
        print("compiled extension not available; nothing to compare", file=sys.stderr)
        return 1

    repeats = 2 if args.quick else 3
    cases = [
        ("cd_fit       n=200 p=20  lam=0.1*max", lambda m: bench_cd(m, 200, 20, 0.1, repeats)),
        ("cd_fit       n=200 p=20  lam=1e-3*max", lambda m: bench_cd(m, 200, 20, 1e-3, repeats)),
        ("cd_fit       n=300 p=40  lam=0.01*max", lambda m: bench_cd(m, 300, 40, 0.01, repeats)),
        ("stepwise     n=200 p=20", lambda m: bench_stepwise(m, 200, 20, repeats)),
        ("stepwise     n=300 p=40", lambda m: bench_stepwise(m, 300, 40, repeats)),
        ("best_subset  n=100 p=12", lambda m: bench_best_subset(m, 100, 12, repeats)),
    ]
    if not args.quick:
        cases.append(("best_subset  n=100 p=16", lambda m: bench_best_subset(m, 100, 16, repeats)))

    print(f"{'workload':<40} {'pure':>10} {'compiled':>10} {'speedup':>9}")
    for name, fn in cases:
        t_py = fn(_pykernels)
        t_c = fn(_ckernels)
        print(f"{name:<40} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms {t_py / t_c:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
