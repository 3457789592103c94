"""Walk through the 2x2 system x(k) = A (x) x(k-1) with A = [[2,5],[3,3]].

Prints its spectral data, piecewise-affine regions, forward and backward
reach sets, the one-shot formula, and the verdicts of all eight algorithm
variants for two targets: an unreachable one and a reachable one.
"""

from mplreach import Dbm, MaxPlusMatrix, ReachSpec, pwa_generate, transient_cyclicity
from mplreach.bench import ALGORITHMS, run_algorithm
from mplreach.difflogic import encode_bounded
from mplreach.dbm import canonicalize
from mplreach.reach_explicit import backward_reach_sets, forward_reach_sets

A = MaxPlusMatrix([[2, 5], [3, 3]])
X = Dbm.from_constraints(2, [(1, 2, ">=", 3)])
Y = Dbm.from_constraints(2, [(1, 2, ">=", 5)])

p = transient_cyclicity(A)
print(f"lambda = {p.lam}, k0 = {p.k0}, c = {p.c}, threshold N* = {p.threshold}")

print("\nregions:")
for r in pwa_generate(A):
    dyn = ", ".join(f"x{i + 1}' = x{g} + {a}" for i, (g, a) in enumerate(zip(r.g, r.offsets)))
    cons = " and ".join(str(c) for c in r.region.constraints())
    print(f"  g={r.g}: {cons:32s} {dyn}")

print("\nforward sets from X = {x1 - x2 >= 3}:")
for k, S in enumerate(forward_reach_sets(A, canonicalize(X), p.threshold), start=1):
    print(f"  X{k} = " + " | ".join(" and ".join(map(str, D.constraints())) for D in S))

back = backward_reach_sets(A, canonicalize(Y), p.threshold)
print(f"\nbackward set Y_-1 from Y = {{x1 - x2 >= 5}} is empty: {back[0].is_empty()}")

print("\none-shot formula for N = 3:")
for frag in encode_bounded(ReachSpec(A, X, Y, 3, "forward", "oneshot")):
    print("  ", frag)

target = Dbm.from_constraints(2, [(1, 2, "=", 2)])
for name, goal in (("x1 - x2 >= 5", Y), ("x1 - x2 = 2", target)):
    print(f"\ntarget {name}:")
    for alg, (family, mode, strategy) in ALGORITHMS.items():
        r = run_algorithm(alg, ReachSpec(A, X, goal, p.threshold, mode, strategy))
        line = f"  alg {alg} ({family:8s} {mode:8s} {strategy:10s}) reachable={r.reachable} step={r.step}"
        if r.witness:
            line += f" witness={[[int(v) for v in x] for x in r.witness]}"
        print(line)
