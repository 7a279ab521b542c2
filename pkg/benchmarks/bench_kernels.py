#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the NumPy fallback.

Times the weighted primary-factor sum on generated exponential measures
at a few sizes, checks that both backends agree, and prints a small
table with the speedup.

Usage:  python benchmarks/bench_kernels.py [--rmax 8.0] [--points 256]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from concidx import generate_profile, make_profile
from concidx.kernels import get_backend
from concidx.product import atom_genera


def bench(rmax: float, points: int) -> None:
    fn, text = make_profile("exp")
    mu = generate_profile(fn, rmax, 42, description=text)
    genera = atom_genera(mu, 1.1)
    rng = np.random.default_rng(1)
    r = 0.55 * rmax
    zs = r * np.exp(1j * rng.uniform(0, 2 * np.pi, points))

    results = {}
    for name in ("compiled", "pure"):
        try:
            backend = get_backend(name)
        except ImportError:
            print(f"{name}: unavailable, skipped")
            continue
        t0 = time.perf_counter()
        vals = backend.eval_sum_many(zs, mu.locations, mu.masses, genera)
        results[name] = (time.perf_counter() - t0, vals)

    print(f"rmax={rmax} atoms={len(mu)} points={points}")
    for name, (dt, _) in results.items():
        print(f"  {name:9s} {dt * 1e3:10.2f} ms")
    if len(results) == 2:
        (tc, vc), (tp, vp) = results["compiled"], results["pure"]
        scale = np.maximum(1.0, np.abs(vc))
        worst = float(np.max(np.abs(vc - vp) / scale))
        print(f"  speedup   {tp / tc:10.2f}x   max rel disagreement {worst:.3e}")
        assert worst < 1e-11, "backends disagree beyond tolerance"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rmax", type=float, default=8.0)
    ap.add_argument("--points", type=int, default=256)
    args = ap.parse_args()
    for rmax in (5.0, args.rmax):
        bench(rmax, args.points)


if __name__ == "__main__":
    main()
