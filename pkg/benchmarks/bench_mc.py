#!/usr/bin/env python3
"""Benchmark the Monte Carlo trial kernels: compiled extension vs pure Python.

Runs the same seeded simulation on every available backend, checks the
results agree bit for bit, and prints throughput per backend.

    python3 benchmarks/bench_mc.py --trials 2000000 --delta 0.5
"""

import argparse
import time

from elitegt.game import refund_game
from elitegt.repeated import available_backends, grim_trigger, simulate_payoff


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=1_000_000)
    parser.add_argument("--delta", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3, help="timed repetitions, best kept")
    args = parser.parse_args()

    game = refund_game()
    aut_a, aut_b = grim_trigger(game, (0, 0), (1, 1))

    results = {}
    timings = {}
    for backend in available_backends():
        best = float("inf")
        for _ in range(args.repeat):
            started = time.perf_counter()
            results[backend] = simulate_payoff(
                game, aut_a, aut_b, args.delta, args.trials, args.seed, backend=backend
            )
            best = min(best, time.perf_counter() - started)
        timings[backend] = best

    distinct = {r for r in results.values()}
    if len(distinct) != 1:
        raise SystemExit(f"backend results disagree: {results}")

    sample = next(iter(results.values()))
    print(f"trials={args.trials} delta={args.delta} seed={args.seed}")
    print(f"mean payoff: ({sample.mean[0]:.6f}, {sample.mean[1]:.6f})")
    baseline = timings.get("python")
    print(f"{'backend':<10} {'seconds':>10} {'trials/s':>14} {'speedup':>9}")
    for backend, seconds in sorted(timings.items(), key=lambda kv: kv[1]):
        speedup = baseline / seconds if baseline else float("nan")
        print(f"{backend:<10} {seconds:>10.4f} {args.trials / seconds:>14.0f} {speedup:>8.1f}x")


if __name__ == "__main__":
    main()
