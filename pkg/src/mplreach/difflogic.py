"""Negation-free difference-logic formulas and the MPL encodings.

Atoms are ``x_i@k - x_j@l  rel  c`` with ``rel`` one of ``>=``, ``>``, ``=``;
``<=`` and ``<`` are accepted by :func:`atom` and flipped on the way in.
A formula is an :class:`Atom`, an :class:`And`, an :class:`Or`, or one of the
constants :data:`TRUE` / :data:`FALSE`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .dbm import Dbm, DbmError, canonicalize
from .maxplus import EPS, MaxPlusMatrix, NotRegularError, as_scalar, mp_power
from .problem import ReachSpec


@dataclass(frozen=True, order=True)
class DLVar:
    """State variable ``x_index`` at event counter ``stage``.

    ``index == 0`` is the zero reference ``x0``; it has no stage.
    """

    index: int
    stage: int = 0

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("variable index must be >= 0")
        if self.index == 0 and self.stage != 0:
            object.__setattr__(self, "stage", 0)

    @property
    def name(self) -> str:
        return "x0" if self.index == 0 else f"x{self.index}@{self.stage}"

    def __str__(self):
        return self.name

    def at(self, stage: int) -> "DLVar":
        return self if self.index == 0 else DLVar(self.index, stage)


ZERO_VAR = DLVar(0, 0)

RELATIONS = (">=", ">", "=")


@dataclass(frozen=True)
class Atom:
    lhs: DLVar
    rhs: DLVar
    rel: str
    c: object

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise ValueError(f"atom relates {self.lhs} to itself")
        if self.rel not in RELATIONS:
            raise ValueError(f"relation {self.rel!r} not in {RELATIONS}")

    def __str__(self):
        return f"({self.lhs} - {self.rhs} {self.rel} {self.c})"

    def holds(self, model) -> bool:
        d = _value(model, self.lhs) - _value(model, self.rhs)
        if self.rel == ">=":
            return d >= self.c
        if self.rel == ">":
            return d > self.c
        return d == self.c

    def expand(self) -> tuple["Atom", ...]:
        """``=`` as two ``>=`` atoms; other atoms unchanged."""
        if self.rel != "=":
            return (self,)
        return (Atom(self.lhs, self.rhs, ">=", self.c), Atom(self.rhs, self.lhs, ">=", -self.c))


def _value(model, v):
    return 0 if v.index == 0 else model[v]


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self):
        if not self.args:
            return "true"
        return "(" + " & ".join(str(a) for a in self.args) + ")"


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self):
        if not self.args:
            return "false"
        return "(" + " | ".join(str(a) for a in self.args) + ")"


TRUE = And(())
FALSE = Or(())


def atom(lhs: DLVar, rhs: DLVar, rel: str, c) -> Atom:
    c = as_scalar(c)
    if c is EPS:
        raise ValueError("atom constants must be finite")
    if rel == "<=":
        return Atom(rhs, lhs, ">=", -c)
    if rel == "<":
        return Atom(rhs, lhs, ">", -c)
    return Atom(lhs, rhs, rel, c)


def conj(*parts) -> And:
    """Conjunction, flattening nested conjunctions and dropping TRUE."""
    out = []
    for p in parts:
        if isinstance(p, And):
            out.extend(p.args)
        else:
            out.append(p)
    return And(tuple(out))


def disj(*parts) -> Or:
    out = []
    for p in parts:
        if isinstance(p, Or):
            out.extend(p.args)
        else:
            out.append(p)
    return Or(tuple(out))


def atoms(f) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
        return
    for a in f.args:
        yield from atoms(a)


def variables(f) -> set:
    out = set()
    for a in atoms(f):
        out.add(a.lhs)
        out.add(a.rhs)
    return out


def count_atoms(f) -> int:
    return sum(1 for _ in atoms(f))


def evaluate(f, model) -> bool:
    """Truth value of ``f`` under a complete assignment ``DLVar -> number``."""
    if isinstance(f, Atom):
        return f.holds(model)
    if isinstance(f, And):
        return all(evaluate(a, model) for a in f.args)
    return any(evaluate(a, model) for a in f.args)


def map_vars(f, fn: Callable[[DLVar], DLVar]):
    if isinstance(f, Atom):
        return Atom(fn(f.lhs), fn(f.rhs), f.rel, f.c)
    return type(f)(tuple(map_vars(a, fn) for a in f.args))


def substitute_stage(f, old: int, new: int):
    """Replace every variable of stage ``old`` by the same index at ``new``."""
    return map_vars(f, lambda v: v.at(new) if v.stage == old and v.index else v)


def shift_stages(f, delta: int):
    return map_vars(f, lambda v: v.at(v.stage + delta))


def infix(f) -> str:
    return str(f)


def encode_step(A: MaxPlusMatrix, from_stage: int, to_stage: int) -> And:
    """``x(to) = A (x) x(from)`` as a difference-logic formula.

    Row ``i`` contributes ``x_i(to) - x_j(from) >= A(i,j)`` for every finite
    ``A(i,j)`` and the disjunction of the matching equalities, in ascending
    ``j``. The structure is kept as is (singleton disjunctions included), so
    the atom count is exactly twice the number of finite entries.
    """
    if not A.is_regular():
        raise NotRegularError("every row of A needs a finite entry")
    rows = []
    for i in range(A.n):
        lhs = DLVar(i + 1, to_stage)
        fin = A.finite_indices(i)
        ge = tuple(Atom(lhs, DLVar(j + 1, from_stage), ">=", A.rows[i][j]) for j in fin)
        eq = Or(tuple(Atom(lhs, DLVar(j + 1, from_stage), "=", A.rows[i][j]) for j in fin))
        rows.append(And(ge + (eq,)))
    return And(tuple(rows))


def dbm_to_formula(D: Dbm, stage: int, allow_x0: bool = False):
    """Conjunction of ``>=``/``>`` atoms equivalent to ``D`` at ``stage``.

    Reads the canonical bounds; each finite ``bounds[i][j]`` (``x_i - x_j <=
    c``) becomes ``x_j - x_i >= -c``. The unconstrained set gives TRUE.
    """
    Dc = canonicalize(D)
    if Dc is None:
        return FALSE
    size = Dc.n + 1
    out = []
    for i in range(size):
        for j in range(size):
            b = Dc.bounds[i][j]
            if i == j or b is None:
                continue
            if (i == 0 or j == 0) and not (allow_x0 or Dc.allow_x0):
                raise DbmError("single-variable bound found; enable x0 handling")
            vi = ZERO_VAR if i == 0 else DLVar(i, stage)
            vj = ZERO_VAR if j == 0 else DLVar(j, stage)
            out.append(Atom(vj, vi, ">=" if b[1] else ">", -b[0]))
    return And(tuple(out))


def encode_bounded(spec: ReachSpec) -> list:
    """Ordered fragments of the bounded reachability formula for ``spec.N``.

    forward/sequential: ``[X@0, Im(0,1), ..., Im(N-1,N), Y@N]``
    forward/oneshot:    ``[X@0, Im_{A^N}(0,1), Y@1]``
    backward/sequential: ``[Y@0, Im(-1,0), ..., Im(-N,1-N), X@-N]``
    backward/oneshot:   ``[Y@0, Im_{A^N}(-1,0), X@-1]``
    """
    A, N = spec.A, spec.N
    if N < 1:
        raise ValueError("encode_bounded needs N >= 1")
    if spec.strategy == "oneshot":
        AN = mp_power(A, N)
        if spec.mode == "forward":
            return [dbm_to_formula(spec.X, 0), encode_step(AN, 0, 1), dbm_to_formula(spec.Y, 1)]
        return [dbm_to_formula(spec.Y, 0), encode_step(AN, -1, 0), dbm_to_formula(spec.X, -1)]
    if spec.mode == "forward":
        steps = [encode_step(A, k - 1, k) for k in range(1, N + 1)]
        return [dbm_to_formula(spec.X, 0), *steps, dbm_to_formula(spec.Y, N)]
    steps = [encode_step(A, -k, 1 - k) for k in range(1, N + 1)]
    return [dbm_to_formula(spec.Y, 0), *steps, dbm_to_formula(spec.X, -N)]


def fragment_variables(fragments: Sequence) -> set:
    out = set()
    for f in fragments:
        out |= variables(f)
    return out
