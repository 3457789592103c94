"""Shared fixtures-by-function for the test modules."""

from __future__ import annotations

import itertools
import shutil
from fractions import Fraction

import numpy as np

from mplreach.bench import gen_irreducible
from mplreach.dbm import Dbm, canonicalize
from mplreach.maxplus import EPS, MaxPlusMatrix

# 2x2 running instance
A2 = MaxPlusMatrix([[2, 5], [3, 3]])
X2 = Dbm.from_constraints(2, [(1, 2, ">=", 3)])
Y2 = Dbm.from_constraints(2, [(1, 2, ">=", 5)])

HAVE_Z3 = shutil.which("z3") is not None


def random_matrix(rng, n, density=0.6, lo=-5, hi=9):
    """Matrix with independent finite entries; every row gets at least one."""
    rows = []
    for _ in range(n):
        row = [int(rng.integers(lo, hi + 1)) if rng.random() < density else EPS for _ in range(n)]
        if all(v is EPS for v in row):
            row[int(rng.integers(0, n))] = int(rng.integers(lo, hi + 1))
        rows.append(row)
    return MaxPlusMatrix(rows)


def random_set(n, rng, max_cons=2, span=12):
    """Non-empty Dbm made of one or two random difference constraints."""
    while True:
        cons = []
        for _ in range(int(rng.integers(1, max_cons + 1))):
            i, j = rng.choice(n, size=2, replace=False)
            op = (">=", "<=", "=")[int(rng.integers(0, 3))]
            cons.append((int(i) + 1, int(j) + 1, op, int(rng.integers(-span, span + 1))))
        D = Dbm.from_constraints(n, cons)
        if canonicalize(D) is not None:
            return D


def differential_instance(seed, idx):
    """Instance ``idx`` of the seeded differential workload (N = 10)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(idx,)))
    n = int(rng.integers(3, 7))
    m = int(rng.integers(2, n + 1))
    A = gen_irreducible(n, m, (1, 20), rng)
    return A, random_set(n, rng), random_set(n, rng)


def random_point(rng, n, span=20):
    return [int(rng.integers(-span, span + 1)) for _ in range(n)]


def cycle_means(A):
    """Every elementary-cycle mean of the precedence graph, by enumeration."""
    n = A.n
    means = []
    for size in range(1, n + 1):
        for nodes in itertools.permutations(range(n), size):
            if nodes[0] != min(nodes):
                continue
            total = 0
            for a, b in zip(nodes, nodes[1:] + nodes[:1]):
                w = A.rows[b][a]
                if w is EPS:
                    break
                total += w
            else:
                means.append(Fraction(total, size))
    return means


def bellman_ford_sat(n_nodes, edges):
    """Negative-cycle oracle for edges ``x_v - x_u <= c + d * delta``.

    ``w = (c, d)`` with ``d = -1`` for a strict bound and ``0`` otherwise;
    delta is infinitesimal, so weights compare lexicographically.
    """
    dist = [(0, 0)] * n_nodes
    for _ in range(n_nodes):
        changed = False
        for u, v, (c, s) in edges:
            cand = (dist[u][0] + c, dist[u][1] + s)
            if cand < dist[v]:
                dist[v] = cand
                changed = True
        if not changed:
            return True
    return False


def point_of(D, shift=0):
    """A point of a canonical Dbm without strict bounds or x0 bounds.

    On a closed matrix ``x_i = min(0, min_j D[i][j])`` is a shortest-path
    potential from a virtual source, hence a solution.
    """
    n = D.n
    x = []
    for i in range(1, n + 1):
        best = 0
        for j in range(1, n + 1):
            b = D.bounds[i][j]
            if b is not None and b[0] < best:
                best = b[0]
        x.append(best + shift)
    assert D.contains(x)
    return x


def oracle_edges(a):
    """``x_v - x_u <= c + d * delta`` edges of one atom, for the oracles here."""
    c = Fraction(a.c)
    if a.rel == ">=":
        return [(a.lhs, a.rhs, (-c, 0))]
    if a.rel == ">":
        return [(a.lhs, a.rhs, (-c, -1))]
    return [(a.lhs, a.rhs, (-c, 0)), (a.rhs, a.lhs, (c, 0))]


def conjunction_sat(atom_list):
    names = {}
    edges = []
    for a in atom_list:
        for u, v, w in oracle_edges(a):
            edges.append((names.setdefault(u, len(names)), names.setdefault(v, len(names)), w))
    return bellman_ford_sat(max(len(names), 1), edges)


def oracle_sat(frames):
    """Satisfiability of a conjunction of And/Or trees by case splitting.

    Depth-first over the disjunctions, pruning a branch as soon as the atoms
    chosen so far have a negative cycle.
    """
    from mplreach.difflogic import And, Atom

    def search(pending, chosen):
        if not conjunction_sat(chosen):
            return False
        if not pending:
            return True
        f, rest = pending[0], pending[1:]
        if isinstance(f, Atom):
            return search(rest, chosen + [f])
        if isinstance(f, And):
            return search(list(f.args) + rest, chosen)
        return any(search([g] + rest, chosen) for g in f.args)

    return search(list(frames), [])
