"""Difference-bound matrices over x1..xn plus the zero clock x0.

A bound is either ``None`` (unbounded) or a pair ``(value, flag)`` encoding
``x_i - x_j <= value`` when ``flag == 1`` and ``x_i - x_j < value`` when
``flag == 0``. With that encoding Python's tuple order is the tightness
order, and adding two bounds is ``(v1 + v2, f1 & f2)``.

``bounds[i][j]`` always stores an *upper* bound on ``x_i - x_j``. Lower-bound
constraints such as ``x_i - x_j >= c`` are stored as ``x_j - x_i <= -c``.

Operations return a canonical :class:`Dbm`, or ``None`` for the empty set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .maxplus import as_scalar, EPS

ZERO = (0, 1)

_OPS = (">=", ">", "<=", "<", "=")


class DbmError(ValueError):
    pass


class Constraint(NamedTuple):
    """``x_i - x_j <op> c`` with one-based variable indices (0 is the zero clock)."""

    i: int
    j: int
    op: str
    c: object

    def __str__(self):
        return f"x{self.i} - x{self.j} {self.op} {self.c}"

    def holds(self, point: Sequence) -> bool:
        xi = 0 if self.i == 0 else point[self.i - 1]
        xj = 0 if self.j == 0 else point[self.j - 1]
        d = xi - xj
        return {
            ">=": d >= self.c,
            ">": d > self.c,
            "<=": d <= self.c,
            "<": d < self.c,
            "=": d == self.c,
        }[self.op]


def _tighter(a, b):
    """The tighter of two bounds (None is the loosest)."""
    if a is None:
        return b
    if b is None:
        return a
    return a if a < b else b


def _add(a, b):
    if a is None or b is None:
        return None
    return (a[0] + b[0], a[1] & b[1])


def _universe_rows(size):
    return [[ZERO if i == j else None for j in range(size)] for i in range(size)]


@dataclass(frozen=True, eq=False)
class Dbm:
    """Conjunction of difference constraints on ``n`` real variables.

    Instances produced by this module's operations are canonical. A Dbm
    built straight from constraints may not be; pass it through
    :func:`canonicalize` before relying on emptiness or equality.
    """

    n: int
    bounds: tuple
    canonical: bool = False
    allow_x0: bool = False

    @classmethod
    def universe(cls, n: int, allow_x0: bool = False) -> "Dbm":
        rows = tuple(tuple(r) for r in _universe_rows(n + 1))
        return cls(n, rows, canonical=True, allow_x0=allow_x0)

    @classmethod
    def from_constraints(cls, n: int, constraints: Iterable, allow_x0: bool = False) -> "Dbm":
        """Build a (non-canonical) Dbm from ``(i, j, op, c)`` tuples."""
        rows = _universe_rows(n + 1)
        for con in constraints:
            i, j, op, c = con
            c = as_scalar(c)
            if c is EPS:
                raise DbmError("constraint constants must be finite")
            if not (0 <= i <= n and 0 <= j <= n):
                raise DbmError(f"variable index out of range in {con!r} (n={n})")
            if i == j:
                raise DbmError(f"constraint {con!r} relates a variable to itself")
            if (i == 0 or j == 0) and not allow_x0:
                raise DbmError(
                    f"single-variable constraint {con!r} needs allow_x0=True"
                )
            for a, b, bound in _to_upper(i, j, op, c):
                rows[a][b] = _tighter(rows[a][b], bound)
        return cls(n, tuple(tuple(r) for r in rows), canonical=False, allow_x0=allow_x0)

    def __eq__(self, other):
        if not isinstance(other, Dbm):
            return NotImplemented
        return self.n == other.n and self.bounds == other.bounds

    def __hash__(self):
        return hash((self.n, self.bounds))

    def __repr__(self):
        cons = ", ".join(str(c) for c in self.constraints())
        return f"Dbm(n={self.n}, {{{cons}}})"

    def is_universe(self) -> bool:
        size = self.n + 1
        return all(self.bounds[i][j] is None for i in range(size) for j in range(size) if i != j)

    def contains(self, point: Sequence) -> bool:
        """Exact membership test for a point of length ``n``."""
        if len(point) != self.n:
            raise DbmError(f"point of length {len(point)} for a Dbm over {self.n} variables")
        vals = [0] + list(point)
        size = self.n + 1
        for i in range(size):
            row = self.bounds[i]
            for j in range(size):
                b = row[j]
                if b is None:
                    continue
                d = vals[i] - vals[j]
                if d > b[0] or (d == b[0] and not b[1]):
                    return False
        return True

    def includes(self, other: "Dbm") -> bool:
        """``other`` is a subset of ``self`` (both canonical)."""
        for ra, rb in zip(self.bounds, other.bounds):
            for a, b in zip(ra, rb):
                if a is None:
                    continue
                if b is None or b > a:
                    return False
        return True

    def constraints(self) -> list[Constraint]:
        """Constraints in the ``>=``/``>``/``=``/``<=``/``<`` text style.

        One entry per unordered variable pair and direction, reading
        ``bounds[j][i]`` as a lower bound on ``x_i - x_j``; pairs whose lower
        and upper bounds coincide collapse to ``=``.
        """
        out = []
        size = self.n + 1
        for i in range(size):
            for j in range(i + 1, size):
                lo = self.bounds[j][i]
                hi = self.bounds[i][j]
                if i == 0:
                    # report single-variable bounds on x_j as x_j - x0
                    lo, hi = hi, lo
                    a, b = j, 0
                else:
                    a, b = i, j
                if lo is not None and hi is not None and lo[1] and hi[1] and -lo[0] == hi[0]:
                    out.append(Constraint(a, b, "=", hi[0]))
                    continue
                if lo is not None:
                    out.append(Constraint(a, b, ">=" if lo[1] else ">", -lo[0]))
                if hi is not None:
                    out.append(Constraint(a, b, "<=" if hi[1] else "<", hi[0]))
        return out

    def to_text(self) -> str:
        return "".join(f"{c}\n" for c in self.constraints())


def _to_upper(i, j, op, c):
    """Translate ``x_i - x_j op c`` into upper-bound entries ``(row, col, bound)``."""
    if op == ">=":
        return [(j, i, (-c, 1))]
    if op == ">":
        return [(j, i, (-c, 0))]
    if op == "<=":
        return [(i, j, (c, 1))]
    if op == "<":
        return [(i, j, (c, 0))]
    if op == "=":
        return [(i, j, (c, 1)), (j, i, (-c, 1))]
    raise DbmError(f"unknown relation {op!r}")


def close(rows: list) -> bool:
    """Floyd-Warshall tightening of a mutable bounds matrix, in place.

    Returns False if a negative cycle was found (the set is empty).
    """
    size = len(rows)
    for k in range(size):
        rowk = rows[k]
        for i in range(size):
            rowi = rows[i]
            bik = rowi[k]
            if bik is None or i == k:
                continue
            v, f = bik
            for j in range(size):
                bkj = rowk[j]
                if bkj is None:
                    continue
                s = v + bkj[0]
                cur = rowi[j]
                if cur is None or s < cur[0] or (s == cur[0] and cur[1] and not (f & bkj[1])):
                    rowi[j] = (s, f & bkj[1])
        if rows[k][k] < ZERO:
            return False
    return all(rows[i][i] >= ZERO for i in range(size))


def _freeze(n, rows, allow_x0):
    for i in range(len(rows)):
        rows[i][i] = ZERO
    return Dbm(n, tuple(tuple(r) for r in rows), canonical=True, allow_x0=allow_x0)


def canonicalize(D: Dbm) -> Optional[Dbm]:
    """All-pairs tightest closure of ``D``; ``None`` if ``D`` is empty."""
    if D.canonical:
        return D
    rows = [list(r) for r in D.bounds]
    if not close(rows):
        return None
    return _freeze(D.n, rows, D.allow_x0)


def is_empty(D: Dbm) -> bool:
    return canonicalize(D) is None


def _check_dim(D1, D2):
    if D1.n != D2.n:
        raise DbmError(f"dimension mismatch: {D1.n} vs {D2.n}")


def disjoint_quick(D1: Dbm, D2: Dbm) -> bool:
    """Cheap sufficient test for ``D1 & D2 == {}`` on canonical inputs.

    Looks only for two-edge negative cycles; a False answer proves nothing.
    """
    for r1, c2 in zip(D1.bounds, zip(*D2.bounds)):
        for a, b in zip(r1, c2):
            if a is None or b is None:
                continue
            s = a[0] + b[0]
            if s < 0 or (s == 0 and not (a[1] & b[1])):
                return True
    return False


def intersect(D1: Dbm, D2: Dbm) -> Optional[Dbm]:
    _check_dim(D1, D2)
    if D1.canonical and D2.canonical and disjoint_quick(D1, D2):
        return None
    rows = [[_tighter(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(D1.bounds, D2.bounds)]
    if not close(rows):
        return None
    return _freeze(D1.n, rows, D1.allow_x0 or D2.allow_x0)


def _check_map(D, g, a):
    if len(g) != D.n or len(a) != D.n:
        raise DbmError(f"affine map of size {len(g)}/{len(a)} for a Dbm over {D.n} variables")
    for gi in g:
        if not 1 <= gi <= D.n:
            raise DbmError(f"source index {gi} out of range 1..{D.n}")


def image_affine(D: Dbm, g: Sequence[int], a: Sequence, method: str = "project") -> Optional[Dbm]:
    """Image of ``D`` under ``x'_i = x_{g_i} + a_i`` (``g`` one-based).

    ``method="project"`` reads the result off the canonical matrix of ``D``
    directly: after closure, ``x'_i - x'_j`` is bounded exactly by
    ``D[g_i][g_j] + a_i - a_j``. ``method="closure"`` builds the joint
    system over ``2n+1`` variables, closes it and projects onto the primed
    block. Both give the same canonical Dbm.
    """
    _check_map(D, g, a)
    D = canonicalize(D)
    if D is None:
        return None
    if method == "closure":
        return _image_by_closure(D, g, a)
    if method != "project":
        raise ValueError(f"unknown image method {method!r}")
    src = (0,) + tuple(g)
    off = (0,) + tuple(as_scalar(v) for v in a)
    B = D.bounds
    rows = []
    for i, gi in enumerate(src):
        bi = B[gi]
        ai = off[i]
        row = []
        for j, gj in enumerate(src):
            b = bi[gj]
            if b is None:
                row.append(None)
            else:
                row.append((b[0] + ai - off[j], b[1]))
        rows.append(row)
    return _freeze(D.n, rows, D.allow_x0)


def _image_by_closure(D, g, a):
    n = D.n
    size = 2 * n + 1
    rows = _universe_rows(size)
    for i in range(n + 1):
        for j in range(n + 1):
            rows[i][j] = D.bounds[i][j]
    for i in range(1, n + 1):
        ai = as_scalar(a[i - 1])
        p, s = n + i, g[i - 1]
        rows[p][s] = (ai, 1)
        rows[s][p] = (-ai, 1)
    if not close(rows):
        return None
    keep = [0] + list(range(n + 1, size))
    out = [[rows[i][j] for j in keep] for i in keep]
    return _freeze(n, out, D.allow_x0)


def preimage_affine(
    D: Dbm, g: Sequence[int], a: Sequence, within: Optional[Dbm] = None
) -> Optional[Dbm]:
    """All ``x`` whose image ``x_{g_i} + a_i`` lies in ``D``.

    Each constraint ``x'_i - x'_j <= c`` becomes
    ``x_{g_i} - x_{g_j} <= c - a_i + a_j``. With ``within`` the result is
    additionally intersected with that Dbm in the same closure pass.
    """
    _check_map(D, g, a)
    src = (0,) + tuple(g)
    off = (0,) + tuple(as_scalar(v) for v in a)
    if within is not None:
        _check_dim(D, within)
        rows = [list(r) for r in within.bounds]
    else:
        rows = _universe_rows(D.n + 1)
    for i, ri in enumerate(D.bounds):
        gi, ai = src[i], off[i]
        ti = rows[gi]
        for j, b in enumerate(ri):
            if b is None or i == j:
                continue
            gj = src[j]
            nb = (b[0] - ai + off[j], b[1])
            cur = ti[gj]
            if cur is None or nb < cur:
                ti[gj] = nb
    for i in range(len(rows)):
        if rows[i][i] < ZERO:
            return None
    if not close(rows):
        return None
    return _freeze(D.n, rows, D.allow_x0 or (within is not None and within.allow_x0))


@dataclass(frozen=True)
class DbmUnion:
    """Finite union of non-empty canonical Dbms of one dimension."""

    n: int
    parts: tuple = ()

    @classmethod
    def of(cls, n: int, parts: Iterable[Optional[Dbm]], dedupe: bool = True, reduce: bool = False):
        kept = []
        seen = set()
        for p in parts:
            if p is None:
                continue
            if p.n != n:
                raise DbmError(f"part over {p.n} variables in a union over {n}")
            if dedupe:
                if p in seen:
                    continue
                seen.add(p)
            kept.append(p)
        if reduce:
            kept = _drop_subsumed(kept)
        return cls(n, tuple(kept))

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, point) -> bool:
        return any(p.contains(point) for p in self.parts)

    def intersects(self, D: Dbm) -> bool:
        return any(intersect(p, D) is not None for p in self.parts)

    def covers(self, D: Dbm) -> bool:
        """Sufficient check: some single part includes ``D``."""
        return any(p.includes(D) for p in self.parts)


def _drop_subsumed(parts):
    out = []
    for i, p in enumerate(parts):
        dominated = False
        for j, q in enumerate(parts):
            if i != j and q.includes(p) and (not p.includes(q) or j < i):
                dominated = True
                break
        if not dominated:
            out.append(p)
    return out


_CON_RE = re.compile(
    r"^\s*x(\d+)\s*-\s*x(\d+)\s*(>=|<=|>|<|=)\s*(-?\s*[0-9]+(?:\.[0-9]+)?(?:/[0-9]+)?)\s*$"
)


def parse_constraint(line: str) -> Constraint:
    m = _CON_RE.match(line)
    if not m:
        raise DbmError(f"cannot parse constraint {line!r}")
    i, j, op, c = m.groups()
    return Constraint(int(i), int(j), op, as_scalar(Fraction(c.replace(" ", ""))))


def parse_set(text: str, n: int, allow_x0: bool = False) -> Dbm:
    """Read the set text format (one ``x<i> - x<j> <op> c`` per line)."""
    cons = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            cons.append(parse_constraint(line))
    return Dbm.from_constraints(n, cons, allow_x0=allow_x0)
