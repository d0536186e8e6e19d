#!/usr/bin/env python3
"""Benchmark the compiled mod-p kernels against the pure-Python twin.

Runs each kernel on identical seeded workloads, verifies both backends
produce identical outputs, and prints a timing table.

Usage: python3 benchmarks/bench_kernels.py [--n 4] [--p 2] [--reps 20000]
"""

import argparse
import random
import time

from rankderiv import _kernels_py as pure

try:
    from rankderiv import _kernels as compiled
except ImportError:
    compiled = None


def workload(rng, n, p, count):
    return [
        [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
        for _ in range(count)
    ]


def bench(label, fn, args_list):
    start = time.perf_counter()
    out = [fn(*args) for args in args_list]
    elapsed = time.perf_counter() - start
    return out, elapsed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--reps", type=int, default=20000)
    args = ap.parse_args()

    if compiled is None:
        print("compiled kernels unavailable; nothing to compare")
        return 1

    rng = random.Random(f"bench|{args.n}|{args.p}|{args.reps}")
    mats = workload(rng, args.n, args.p, args.reps)
    pairs = list(zip(mats, mats[1:] + mats[:1]))

    cases = [
        ("mat_mul", [(a, b, args.p) for a, b in pairs]),
        ("mat_rank", [(a, args.p) for a in mats]),
        ("mat_rnf", [(a, args.p) for a in mats]),
        ("mat_nullspace", [(a, args.p) for a in mats]),
    ]

    print(f"n={args.n} p={args.p} reps={args.reps}")
    print(f"{'kernel':<14} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    for name, argses in cases:
        pure_out, pure_t = bench(name, getattr(pure, name), argses)
        comp_out, comp_t = bench(name, getattr(compiled, name), argses)
        if pure_out != comp_out:
            print(f"{name:<14} BACKEND MISMATCH")
            return 1
        speedup = pure_t / comp_t if comp_t else float("inf")
        print(f"{name:<14} {pure_t:>10.3f} {comp_t:>13.3f} {speedup:>7.1f}x")
    print("outputs identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
