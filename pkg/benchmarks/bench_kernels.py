#!/usr/bin/env python3
"""Benchmark the numba-jitted kernels against their pure-numpy twins.

Usage:
    python benchmarks/bench_kernels.py [--users 3000] [--items 1200]
                                       [--per-user 20] [--iterations 20]

The jitted path is what the package uses by default; the numpy path is the
fallback selected by SOCREC_DISABLE_NUMBA=1. First jit calls include
compilation, so every function is warmed before timing.
"""

import argparse
import time

import numpy as np

from socrec import _kernels
from socrec.synthetic import clustered_dataset


def build_workload(num_users, num_items, per_user):
    ratings, graph, _ = clustered_dataset(
        num_users=num_users,
        num_items=num_items,
        num_clusters=max(2, num_users // 20),
        ratings_per_user=per_user,
        out_degree=8,
        seed=1,
    )
    rng = np.random.default_rng(2)
    k = 10
    user_f = rng.uniform(0, 1, (num_users, k))
    item_f = rng.uniform(0, 1, (num_items, k))
    sim = rng.uniform(0, 1, graph.num_edges)
    return ratings, graph, sim, user_f, item_f


def median_time(fn, args, iterations):
    times = []
    for _ in range(iterations):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return float(np.median(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--users", type=int, default=3000)
    parser.add_argument("--items", type=int, default=1200)
    parser.add_argument("--per-user", type=int, default=20)
    parser.add_argument("--iterations", type=int, default=20)
    args = parser.parse_args()

    if not _kernels.NUMBA_ENABLED:
        raise SystemExit(
            "numba backend is not active (SOCREC_DISABLE_NUMBA set or numba "
            "missing); nothing to compare"
        )

    ratings, graph, sim, user_f, item_f = build_workload(
        args.users, args.items, args.per_user
    )
    print(f"workload: {args.users} users, {args.items} items, "
          f"{ratings.num_entries} ratings, {graph.num_edges} trust edges, k=10")
    print(f"iterations per timing: {args.iterations} (median reported)\n")

    cases = [
        ("squared_error_sum",
         _kernels.squared_error_sum_jit, _kernels.squared_error_sum_numpy,
         (user_f, item_f, ratings.users, ratings.items, ratings.values)),
        ("rating_gradients",
         _kernels.rating_gradients_jit, _kernels.rating_gradients_numpy,
         (user_f, item_f, ratings.users, ratings.items, ratings.values)),
        ("social_penalty",
         _kernels.social_penalty_jit, _kernels.social_penalty_numpy,
         (user_f, graph.edge_src, graph.edge_dst, sim)),
        ("social_gradient",
         _kernels.social_gradient_jit, _kernels.social_gradient_numpy,
         (user_f, graph.edge_src, graph.edge_dst, sim, 0.01)),
        ("vss_edges",
         _kernels.vss_edges_jit, _kernels.vss_edges_numpy,
         (ratings.user_ptr, ratings.items, ratings.values,
          graph.edge_src, graph.edge_dst)),
        ("pcc_edges",
         _kernels.pcc_edges_jit, _kernels.pcc_edges_numpy,
         (ratings.user_ptr, ratings.items, ratings.values, ratings.user_means(),
          graph.edge_src, graph.edge_dst)),
    ]

    header = f"{'kernel':<20} {'numpy':>12} {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    speedups = []
    for name, jit_fn, np_fn, call_args in cases:
        jit_fn(*call_args)  # warm the compiler
        t_np = median_time(np_fn, call_args, args.iterations)
        t_jit = median_time(jit_fn, call_args, args.iterations)
        speedup = t_np / t_jit
        speedups.append(speedup)
        print(f"{name:<20} {t_np * 1e3:>10.3f}ms {t_jit * 1e3:>10.3f}ms "
              f"{speedup:>8.1f}x")
    print("-" * len(header))
    print(f"{'geometric mean':<20} {'':>12} {'':>12} "
          f"{float(np.exp(np.mean(np.log(speedups)))):>8.1f}x")


if __name__ == "__main__":
    main()
