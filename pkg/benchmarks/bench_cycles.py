"""Compare the compiled and pure-Python cycle kernels.

Usage: python3 benchmarks/bench_cycles.py [--repeat N] [--seed S]

Workloads: random graphs at several sizes, complete graphs and the chain
graphs with 2^k cycles.  For each workload both counters run on both
backends; counts and step totals must agree, and the table reports wall
time per backend and the speedup.
"""
from __future__ import annotations

import argparse
import random
import sys
import time

from bocy.cycles import BACKEND, count_cycles_scc, count_cycles_tiernan
from bocy.machine import StateGraph


def random_graph(rng: random.Random, n: int, degree: int) -> StateGraph:
    return StateGraph.from_edges(n, [(u, v) for u in range(n) for v in rng.sample(range(n), degree)])


def complete_graph(n: int) -> StateGraph:
    return StateGraph.from_edges(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def chain_graph(k: int) -> StateGraph:
    """Two parallel lanes of length k closed into a loop: 2^k simple cycles."""
    n = 2 * k + 1
    edges = [(0, 1), (0, 2)]
    for i in range(k - 1):
        for a in (2 * i + 1, 2 * i + 2):
            edges += [(a, 2 * i + 3), (a, 2 * i + 4)]
    edges += [(2 * k - 1, 0), (2 * k, 0)]
    return StateGraph.from_edges(n, edges)


def workloads(seed: int):
    rng = random.Random(seed)
    for n, d in ((8, 2), (10, 3), (12, 3)):
        yield f"random n={n} d={d} x20", [random_graph(rng, n, d) for _ in range(20)]
    for n in (7, 8):
        yield f"complete n={n}", [complete_graph(n)]
    for k in (10, 14):
        yield f"chain k={k}", [chain_graph(k)]


def timed(fn, graphs, pure, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = [(r.count, r.steps) for r in (fn(g, collect=False, pure=pure) for g in graphs)]
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    if BACKEND != "cython":
        print("compiled kernel not available; both columns would time the Python kernel", file=sys.stderr)
        return 1
    print(f"{'workload':<24}{'counter':<10}{'cycles':>10}{'cython s':>11}{'python s':>11}{'speedup':>9}")
    for label, graphs in workloads(args.seed):
        for name, fn in (("tiernan", count_cycles_tiernan), ("scc", count_cycles_scc)):
            fast, a = timed(fn, graphs, False, args.repeat)
            slow, b = timed(fn, graphs, True, args.repeat)
            if a != b:
                print(f"backend mismatch on {label} ({name})", file=sys.stderr)
                return 2
            total = sum(c for c, _ in a)
            print(f"{label:<24}{name:<10}{total:>10}{fast:>11.4f}{slow:>11.4f}{slow / max(fast, 1e-9):>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
