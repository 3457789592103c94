"""Time explicit reach sets against difference-logic checks on seeded instances.

Usage: python3 demos/symbolic_vs_explicit.py [--n 8] [--m 4] [--count 5]
"""

import argparse
import time

from mplreach.bench import ALGORITHMS, BenchConfig, make_instance, run_algorithm
from mplreach.problem import ReachSpec

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=8)
ap.add_argument("--m", type=int, default=4)
ap.add_argument("--count", type=int, default=5)
args = ap.parse_args()
n, m, count = args.n, args.m, args.count
cfg = BenchConfig(pairs=[(n, m)], count=count, seed=1)

print(f"(n,m) = ({n},{m}), standard sets over x1..x5, N = per-instance threshold\n")
print("idx  N   " + "  ".join(f"alg{a:<5d}" for a in ALGORITHMS) + "  verdict")
for idx in range(count):
    A, X, Y, N = make_instance(cfg, (n, m), idx)
    times, verdicts = [], set()
    for alg, (_, mode, strategy) in ALGORITHMS.items():
        t0 = time.perf_counter()
        r = run_algorithm(alg, ReachSpec(A, X, Y, N, mode, strategy))
        times.append(time.perf_counter() - t0)
        verdicts.add((r.reachable, r.step if r.reachable else None))
    assert len(verdicts) == 1, verdicts
    print(f"{idx:<4d} {N:<3d} " + "  ".join(f"{t:8.4f}" for t in times) + f"  {verdicts.pop()}")
