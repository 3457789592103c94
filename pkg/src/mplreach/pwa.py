"""Piecewise-affine form of an MPL system.

For every coefficient vector ``g`` (one finite column per row) the region
``R_g`` is the set of states where row ``i`` of ``A (x) x`` attains its
maximum at column ``g_i``; on ``R_g`` the dynamics are
``x_i' = x_{g_i} + A(i, g_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .dbm import Dbm, canonicalize
from .maxplus import EPS, MaxPlusMatrix, NotRegularError, as_scalar


@dataclass(frozen=True)
class PwaRegion:
    g: tuple  # one-based column choice per row
    region: Dbm
    offsets: tuple

    def apply(self, x: Sequence) -> list:
        return [x[gi - 1] + ai for gi, ai in zip(self.g, self.offsets)]

    def to_json(self) -> dict:
        return {
            "g": list(self.g),
            "offsets": [str(a) for a in self.offsets],
            "constraints": [str(c) for c in self.region.constraints()],
        }


@dataclass(frozen=True)
class PwaSystem:
    matrix: MaxPlusMatrix
    regions: tuple

    def __len__(self):
        return len(self.regions)

    def __iter__(self):
        return iter(self.regions)

    def candidates(self, D: Dbm) -> list[PwaRegion]:
        """Regions not ruled out as disjoint from the canonical Dbm ``D``.

        A row choice ``g_i`` is dropped when one of its own constraints
        contradicts a bound of ``D`` directly; this is only a filter, the
        surviving regions may still miss ``D``.
        """
        A = self.matrix
        B = D.bounds
        allowed = []
        for i, row in enumerate(A.rows):
            ok = set()
            for gi in A.finite_indices(i):
                top = row[gi]
                bg = B[gi + 1]
                for j, v in enumerate(row):
                    if v is EPS or j == gi:
                        continue
                    b = bg[j + 1]
                    if b is not None:
                        s = b[0] + top - v
                        if s < 0 or (s == 0 and not b[1]):
                            break
                else:
                    ok.add(gi + 1)
            if not ok:
                return []
            allowed.append(ok)
        return [r for r in self.regions if all(gi in al for gi, al in zip(r.g, allowed))]

    def containing(self, x: Sequence) -> list[PwaRegion]:
        return [r for r in self.regions if r.region.contains(x)]

    def step(self, x: Sequence) -> list:
        """One step of the PWA dynamics from ``x`` (first containing region)."""
        for r in self.regions:
            if r.region.contains(x):
                return r.apply(x)
        raise AssertionError("PWA regions must cover the state space")


def _tighten(M, a, b, c, strict=False):
    """Add ``x_a - x_b <= c`` to the canonical plain-number matrix ``M``.

    Returns False if the result is empty. ``M`` holds ``None`` for no bound.
    With ``strict`` every stored bound is read as ``<``, so a cycle of
    weight zero already empties the set.
    """
    cur = M[a][b]
    if cur is not None and cur <= c:
        return True
    back = M[b][a]
    if back is not None and (back + c < 0 or (strict and back + c == 0)):
        return False
    rowb = M[b]
    n = len(M)
    for i in range(n):
        mia = M[i][a]
        if mia is None:
            continue
        base = mia + c
        rowi = M[i]
        for j in range(n):
            mbj = rowb[j]
            if mbj is None:
                continue
            s = base + mbj
            old = rowi[j]
            if old is None or s < old:
                rowi[j] = s
    return True


def _to_dbm(M):
    n = len(M)
    rows = [[(0, 1)] + [None] * n]
    for i in range(n):
        rows.append([None] + [None if v is None else (v, 1) for v in M[i]])
    return Dbm(n, tuple(tuple(r) for r in rows), canonical=True)


def pwa_generate(A: MaxPlusMatrix, full_dimensional: bool = False) -> PwaSystem:
    """Enumerate the non-empty regions of ``A`` in lexicographic order of ``g``.

    Backtracks row by row, tightening the partial region incrementally and
    abandoning a branch as soon as it becomes empty.

    With ``full_dimensional=True`` only regions with a non-empty interior
    are kept (the search runs on the strict inequalities). Ties between
    entries of ``A`` make many closed regions collapse onto common faces;
    the full-dimensional ones alone still cover the state space and carry
    the same dynamics there, so reach sets do not change.
    """
    if not A.is_regular():
        raise NotRegularError("every row of A needs a finite entry")
    n = A.n
    fin = [A.finite_indices(i) for i in range(n)]
    rows = A.rows
    regions = []
    g = [0] * n

    def descend(i, M):
        if i == n:
            offsets = tuple(as_scalar(rows[r][g[r]]) for r in range(n))
            regions.append(PwaRegion(tuple(x + 1 for x in g), _to_dbm(M), offsets))
            return
        row = rows[i]
        for gi in fin[i]:
            top = row[gi]
            M2 = [list(r) for r in M]
            ok = True
            for j in fin[i]:
                # x_j - x_gi <= A(i, gi) - A(i, j)
                if j != gi and not _tighten(M2, j, gi, top - row[j], full_dimensional):
                    ok = False
                    break
            if ok:
                g[i] = gi
                descend(i + 1, M2)

    start = [[0 if i == j else None for j in range(n)] for i in range(n)]
    descend(0, start)
    return PwaSystem(A, tuple(regions))


def region_of(A: MaxPlusMatrix, g: Sequence[int]) -> Optional[Dbm]:
    """The region for one coefficient vector ``g`` (one-based), built directly.

    ``None`` when the region is empty.
    """
    cons = []
    for i in range(A.n):
        gi = g[i] - 1
        top = A.rows[i][gi]
        for j in A.finite_indices(i):
            if j != gi:
                cons.append((g[i], j + 1, ">=", A.rows[i][j] - top))
    return canonicalize(Dbm.from_constraints(A.n, cons))
