#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths on large synthetic tables:

  1. xlogx_sum        - entropy reduction over a J*K joint table
  2. column_residuals - per-cell conditional residual sweep (the MIO check)
  3. dp_segments      - 1-D boundary search DP, O(max_segments * K^2)

Run with the default (auto) backend so both implementations are registered:

    python benchmarks/bench_kernels.py [--cells N] [--categories J] [--iters I]

Under MIOKIT_BACKEND=numpy only the fallback is available and the comparison
is skipped.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from miokit import _kernels


def time_call(fn, *args, iters=5):
    best = float("inf")
    for _ in range(iters):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--cells", type=int, default=200_000,
                        help="grid cells for the reduction benchmarks (default 200000)")
    parser.add_argument("--categories", type=int, default=8)
    parser.add_argument("--dp-cells", type=int, default=800,
                        help="grid cells for the DP benchmark (default 800)")
    parser.add_argument("--iters", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    p = rng.dirichlet(np.ones(args.categories * args.cells)).reshape(
        args.categories, args.cells)
    flat = np.ascontiguousarray(p.ravel())

    p_dp = rng.dirichlet(np.ones(3 * args.dp_cells)).reshape(3, args.dp_cells)
    cat_prefix = np.concatenate([np.zeros((3, 1)), np.cumsum(p_dp, axis=1)], axis=1)
    mass_prefix = np.concatenate([[0.0], np.cumsum(p_dp.sum(axis=0))])
    pmarg = p_dp.sum(axis=1)

    cases = [
        ("xlogx_sum", lambda impl: impl["xlogx_sum"](flat)),
        ("column_residuals", lambda impl: impl["column_residuals"](p)),
        ("dp_segments", lambda impl: impl["dp_segments"](
            cat_prefix, mass_prefix, pmarg, 4)),
    ]

    impls = _kernels.IMPLEMENTATIONS
    print(f"active backend: {_kernels.active_backend()}; "
          f"registered: {', '.join(impls)}")
    print(f"table {args.categories} x {args.cells}; DP grid {args.dp_cells} cells")
    if "numba" in impls:
        print("warming up JIT...", flush=True)
        t0 = time.perf_counter()
        for _, call in cases:
            call(impls["numba"])
        print(f"  done ({time.perf_counter() - t0:.2f}s compile+run)")
    print()
    print(f"{'kernel':<20s} {'backend':<8s} {'best (ms)':>10s} {'speedup':>8s}")
    print("-" * 50)
    for name, call in cases:
        base = None
        for backend in ("numpy", "numba"):
            if backend not in impls:
                continue
            best = time_call(lambda: call(impls[backend]), iters=args.iters)
            if base is None:
                base = best
            speedup = base / best if best > 0 else float("inf")
            print(f"{name:<20s} {backend:<8s} {best * 1e3:>10.3f} {speedup:>7.1f}x")
    if len(impls) == 2:
        print()
        print("agreement check:")
        a = impls["numpy"]["xlogx_sum"](flat)
        b = impls["numba"]["xlogx_sum"](flat)
        print(f"  xlogx_sum        |numpy - numba| = {abs(a - b):.3e}")
        ra = impls["numpy"]["column_residuals"](p)[1]
        rb = impls["numba"]["column_residuals"](p)[1]
        print(f"  column_residuals max |delta|     = {np.max(np.abs(ra - rb)):.3e}")
        va, ca = impls["numpy"]["dp_segments"](cat_prefix, mass_prefix, pmarg, 4)
        vb, cb = impls["numba"]["dp_segments"](cat_prefix, mass_prefix, pmarg, 4)
        same = list(ca) == list(cb)
        print(f"  dp_segments      |delta value|   = {abs(va - vb):.3e}; "
              f"cuts identical: {same}")


if __name__ == "__main__":
    main()
