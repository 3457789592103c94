"""Exact max-plus linear algebra.

Scalars are Python ``int`` or ``fractions.Fraction`` values, plus the
distinguished sentinel :data:`EPS` standing for minus infinity. Floats are
refused on purpose: every verdict downstream (emptiness, satisfiability)
has to be exact.

The precedence graph of ``A`` has an edge ``j -> i`` of weight ``A[i][j]``
for each finite entry, so ``A (x) x`` propagates values along edges.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union


class _Epsilon:
    """The max-plus zero. Singleton; never take arithmetic on it directly."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EPS"

    def __str__(self):
        return "-inf"

    def __reduce__(self):
        return (_Epsilon, ())


EPS = _Epsilon()

Number = Union[int, Fraction]
Scalar = Union[int, Fraction, _Epsilon]


class MaxPlusError(ValueError):
    pass


class DimensionError(MaxPlusError):
    pass


class NotRegularError(MaxPlusError):
    """Some row of the matrix has no finite entry."""


class ReducibleMatrixError(MaxPlusError):
    pass


class CapExceeded(RuntimeError):
    """Power iteration hit its cap before the sequence became periodic."""


def as_scalar(value) -> Scalar:
    """Normalise ``value`` to an exact max-plus scalar.

    Accepts ints, Fractions, ``EPS``, ``None``, ``float('-inf')`` and the
    strings understood by :func:`parse_scalar`.
    """
    if value is EPS or value is None:
        return EPS
    if isinstance(value, bool):
        raise TypeError("booleans are not max-plus scalars")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, float):
        if value == float("-inf"):
            return EPS
        raise TypeError("floating point entries are not accepted; use int or Fraction")
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, Rational):
        return as_scalar(Fraction(value.numerator, value.denominator))
    raise TypeError(f"cannot interpret {value!r} as a max-plus scalar")


def parse_scalar(token: str) -> Scalar:
    token = token.strip()
    if token in ("-inf", ".", "eps", "EPS", "ε"):
        return EPS
    try:
        return as_scalar(Fraction(token))
    except (ValueError, ZeroDivisionError):
        raise MaxPlusError(f"bad scalar token {token!r}") from None


def oplus(a: Scalar, b: Scalar) -> Scalar:
    if a is EPS:
        return b
    if b is EPS:
        return a
    return a if a >= b else b


def otimes(a: Scalar, b: Scalar) -> Scalar:
    if a is EPS or b is EPS:
        return EPS
    return as_scalar(a + b)


def format_scalar(a: Scalar) -> str:
    return "-inf" if a is EPS else str(a)


@dataclass(frozen=True)
class MaxPlusMatrix:
    """Square matrix over the max-plus semiring.

    ``rows[i][j]`` holds ``A(i+1, j+1)``; indices are zero-based in code and
    one-based in every user-facing format.
    """

    rows: tuple

    def __init__(self, rows: Iterable[Iterable]):
        normalised = tuple(tuple(as_scalar(v) for v in row) for row in rows)
        n = len(normalised)
        if n == 0:
            raise DimensionError("empty matrix")
        for row in normalised:
            if len(row) != n:
                raise DimensionError("matrix must be square")
        object.__setattr__(self, "rows", normalised)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __iter__(self):
        return iter(self.rows)

    def __str__(self):
        return "\n".join(" ".join(format_scalar(v) for v in row) for row in self.rows)

    def finite_indices(self, i: int) -> list[int]:
        """Columns of the finite entries in row ``i`` (zero-based, ascending)."""
        return [j for j, v in enumerate(self.rows[i]) if v is not EPS]

    def finite_count(self) -> int:
        return sum(v is not EPS for row in self.rows for v in row)

    def is_regular(self) -> bool:
        return all(any(v is not EPS for v in row) for row in self.rows)

    def shift(self, alpha: Scalar) -> "MaxPlusMatrix":
        """``alpha (x) A``: add ``alpha`` to every finite entry."""
        return MaxPlusMatrix([[otimes(alpha, v) for v in row] for row in self.rows])

    def __matmul__(self, other):
        if isinstance(other, MaxPlusMatrix):
            return mp_matmul(self, other)
        return NotImplemented

    def to_text(self) -> str:
        return f"{self.n}\n{self}\n"


def identity(n: int) -> MaxPlusMatrix:
    return MaxPlusMatrix([[0 if i == j else EPS for j in range(n)] for i in range(n)])


def mp_add(A: MaxPlusMatrix, B: MaxPlusMatrix) -> MaxPlusMatrix:
    if A.n != B.n:
        raise DimensionError(f"cannot add {A.n}x{A.n} and {B.n}x{B.n}")
    return MaxPlusMatrix([[oplus(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A.rows, B.rows)])


def mp_matmul(A: MaxPlusMatrix, B: MaxPlusMatrix) -> MaxPlusMatrix:
    """Max-plus product ``C(i,j) = max_k A(i,k) + B(k,j)``."""
    if A.n != B.n:
        raise DimensionError(f"cannot multiply {A.n}x{A.n} by {B.n}x{B.n}")
    n = A.n
    bcols = [[(k, B.rows[k][j]) for k in range(n) if B.rows[k][j] is not EPS] for j in range(n)]
    out = []
    for arow in A.rows:
        row = []
        for col in bcols:
            best = EPS
            for k, b in col:
                a = arow[k]
                if a is EPS:
                    continue
                s = a + b
                if best is EPS or s > best:
                    best = s
            row.append(best)
        out.append(row)
    return MaxPlusMatrix(out)


def mp_power(A: MaxPlusMatrix, k: int) -> MaxPlusMatrix:
    """``A`` multiplied by itself ``k`` times (``k >= 1``)."""
    if k < 1:
        raise ValueError("mp_power needs k >= 1")
    result = A
    for _ in range(k - 1):
        result = mp_matmul(result, A)
    return result


def mp_apply(A: MaxPlusMatrix, x: Sequence) -> list:
    """``A (x) x`` for a vector ``x``."""
    if len(x) != A.n:
        raise DimensionError(f"vector of length {len(x)} for a {A.n}x{A.n} matrix")
    xs = [as_scalar(v) for v in x]
    out = []
    for row in A.rows:
        best = EPS
        for a, v in zip(row, xs):
            best = oplus(best, otimes(a, v))
        out.append(best)
    return out


def precedence_edges(A: MaxPlusMatrix) -> list[tuple[int, int, Number]]:
    """Edges ``(j, i, A[i][j])`` of the precedence graph."""
    return [(j, i, v) for i, row in enumerate(A.rows) for j, v in enumerate(row) if v is not EPS]


def _reach(n, succ, start):
    seen = {start}
    todo = deque([start])
    while todo:
        u = todo.popleft()
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def is_irreducible(A: MaxPlusMatrix) -> bool:
    """True when the precedence graph is strongly connected."""
    n = A.n
    fwd = [[] for _ in range(n)]
    bwd = [[] for _ in range(n)]
    for j, i, _ in precedence_edges(A):
        fwd[j].append(i)
        bwd[i].append(j)
    if n == 1:
        return A.rows[0][0] is not EPS
    return len(_reach(n, fwd, 0)) == n and len(_reach(n, bwd, 0)) == n


def eigenvalue(A: MaxPlusMatrix) -> Fraction:
    """Maximum cycle mean of the precedence graph (Karp's algorithm).

    Raises :class:`ReducibleMatrixError` unless ``A`` is irreducible.
    """
    if not is_irreducible(A):
        raise ReducibleMatrixError("eigenvalue is only defined here for irreducible matrices")
    n = A.n
    edges = precedence_edges(A)
    # walks[k][v]: heaviest walk with exactly k edges from node 0 to v
    walks = [[EPS] * n for _ in range(n + 1)]
    walks[0][0] = 0
    for k in range(1, n + 1):
        prev, cur = walks[k - 1], walks[k]
        for u, v, w in edges:
            if prev[u] is not EPS:
                s = prev[u] + w
                if cur[v] is EPS or s > cur[v]:
                    cur[v] = s
    best = None
    for v in range(n):
        if walks[n][v] is EPS:
            continue
        worst = None
        for k in range(n):
            if walks[k][v] is EPS:
                continue
            mean = Fraction(walks[n][v] - walks[k][v], n - k)
            if worst is None or mean < worst:
                worst = mean
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


@dataclass(frozen=True)
class SpectralProfile:
    """Eigenvalue, transient ``k0`` and cyclicity ``c`` of an irreducible matrix."""

    lam: Fraction
    k0: int
    c: int

    @property
    def threshold(self) -> int:
        return completeness_threshold(self)


def _normalised_key(P: MaxPlusMatrix, shift):
    return tuple(tuple(EPS if v is EPS else v - shift for v in row) for row in P.rows)


def transient_cyclicity(A: MaxPlusMatrix, cap: int = 2000) -> SpectralProfile:
    """Smallest ``(k0, c)`` with ``A^(k0+c) = (lambda*c) (x) A^k0``.

    Powers are generated one by one; each is stored after subtracting
    ``t * lambda`` from its finite entries, so a periodic match between
    ``A^t`` and an earlier ``A^s`` is a dictionary hit. The first hit gives
    the minimal pair (any valid period is a multiple of the cyclicity).
    """
    lam = eigenvalue(A)
    seen: dict = {}
    P = A
    for t in range(1, cap + 1):
        if t > 1:
            P = mp_matmul(P, A)
        key = _normalised_key(P, lam * t)
        s = seen.get(key)
        if s is not None:
            return SpectralProfile(lam=lam, k0=s, c=t - s)
        seen[key] = t
    raise CapExceeded(f"no periodicity within {cap} powers; raise the cap")


def completeness_threshold(profile: SpectralProfile) -> int:
    return profile.k0 + profile.c - 1


def parse_matrix(text: str) -> MaxPlusMatrix:
    """Read the matrix text format: ``n`` then ``n`` rows of ``n`` tokens.

    Blank lines and ``#`` comments are ignored.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise MaxPlusError("empty matrix file")
    try:
        n = int(lines[0])
    except ValueError:
        raise MaxPlusError(f"first line must be the dimension, got {lines[0]!r}") from None
    if len(lines) - 1 != n:
        raise MaxPlusError(f"expected {n} rows, found {len(lines) - 1}")
    rows = []
    for line in lines[1:]:
        toks = line.split()
        if len(toks) != n:
            raise MaxPlusError(f"row {line!r} does not have {n} entries")
        rows.append([parse_scalar(t) for t in toks])
    return MaxPlusMatrix(rows)
