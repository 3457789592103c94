"""Satisfiability for negation-free difference logic.

The internal engine is a small DPLL(T) solver. Conjunctive atoms become
edges of a constraint graph that is kept consistent with a potential
function (incremental negative-cycle detection); disjunctions become
clauses over atom literals and are searched with conflict-driven clause
learning. A negative cycle is turned into a blocking clause over the
literals on the cycle.

Edge ``u -> v`` with weight ``(c, s)`` encodes ``x_v - x_u <= c`` when
``s == 0`` and ``x_v - x_u < c`` when ``s == -1``; weights and potentials add
componentwise and compare lexicographically, which is the usual
``c - s*delta`` reading of strict bounds. Models are made concrete by
picking a small enough positive ``delta`` afterwards.

The SMT-LIB2 bridge writes the same assertion stack for an external solver
and reads back its verdict and model.
"""

from __future__ import annotations

import heapq
import re
import shlex
import subprocess
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .difflogic import FALSE, TRUE, And, Atom, DLVar, Or, ZERO_VAR, atoms, evaluate, variables
from .maxplus import as_scalar


class SolverError(RuntimeError):
    pass


class ResourceLimit(SolverError):
    """The conflict budget or deadline ran out before a verdict."""


class ExternalSolverError(SolverError):
    pass


class SolverProcessError(ExternalSolverError):
    pass


class SolverParseError(ExternalSolverError):
    pass


class SolverUnknown(ExternalSolverError):
    pass


@dataclass(frozen=True)
class SatVerdict:
    sat: bool
    model: Optional[dict] = None

    @property
    def status(self) -> str:
        return "sat" if self.sat else "unsat"

    def __bool__(self):
        return self.sat


def atom_edges(a: Atom) -> tuple:
    """Constraint-graph edges ``(u, v, weight)`` of an atom (over DLVars)."""
    c = a.c
    if a.rel == ">=":
        return ((a.lhs, a.rhs, (-c, 0)),)
    if a.rel == ">":
        return ((a.lhs, a.rhs, (-c, -1)),)
    return ((a.lhs, a.rhs, (-c, 0)), (a.rhs, a.lhs, (c, 0)))


class _Graph:
    """Difference constraints with a feasible potential, supporting undo."""

    def __init__(self, nnodes: int):
        self.pi = [(0, 0)] * nnodes
        self.out = [[] for _ in range(nnodes)]
        self.trail = []
        self.edges_checked = 0

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int):
        trail, out = self.trail, self.out
        while len(trail) > mark:
            out[trail.pop()].pop()

    def satisfied(self, u, v, w) -> bool:
        pu, pv = self.pi[u], self.pi[v]
        return (pu[0] + w[0], pu[1] + w[1]) >= pv

    def add(self, u: int, v: int, w: tuple, tag):
        """Insert ``u -> v``; return the tags of a negative cycle, or None."""
        pi = self.pi
        self.edges_checked += 1
        pu = pi[u]
        nv = (pu[0] + w[0], pu[1] + w[1])
        pv = pi[v]
        if nv >= pv:
            self.out[u].append((v, w, tag))
            self.trail.append(u)
            return None
        if u == v:
            return [tag]
        new = {v: nv}
        pred = {v: (u, tag)}
        heap = [((nv[0] - pv[0], nv[1] - pv[1]), v)]
        done = set()
        out = self.out
        while heap:
            d, s = heapq.heappop(heap)
            if s in done:
                continue
            ps = new[s]
            base = pi[s]
            if (ps[0] - base[0], ps[1] - base[1]) != d:
                continue
            done.add(s)
            for t, w2, tag2 in out[s]:
                cand = (ps[0] + w2[0], ps[1] + w2[1])
                cur = new.get(t)
                if cur is None:
                    cur = pi[t]
                if cand < cur:
                    if t == u:
                        tags = [tag2]
                        node = s
                        while node != v:
                            p, tg = pred[node]
                            tags.append(tg)
                            node = p
                        tags.append(tag)
                        return tags
                    new[t] = cand
                    pred[t] = (s, tag2)
                    pt = pi[t]
                    heapq.heappush(heap, ((cand[0] - pt[0], cand[1] - pt[1]), t))
        for t, val in new.items():
            pi[t] = val
        self.out[u].append((v, w, tag))
        self.trail.append(u)
        return None

    def all_edges(self):
        for u, lst in enumerate(self.out):
            for v, w, _ in lst:
                yield u, v, w


def _concrete(pi, edges):
    """Exact values from ``(value, delta-count)`` potentials."""
    delta = Fraction(1)
    for u, v, w in edges:
        dv = pi[v][0] - pi[u][0]
        dd = pi[v][1] - pi[u][1]
        slack = w[0] - dv
        # need dv + dd*delta <= w0 + s*delta (strict when s == -1)
        coeff = dd - w[1]
        if slack > 0 and coeff > 0:
            delta = min(delta, Fraction(slack, 1) / coeff / 2)
    return [p[0] + p[1] * delta for p in pi]


RESTARTS = True


def _luby(i: int) -> int:
    """The ``i``-th term (1-based) of the Luby restart sequence."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while i != (1 << k) - 1:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class _Encoding:
    """Literals, clauses and mandatory edges for one assertion stack.

    Every theory literal stands for one edge; an ``=`` atom inside a
    disjunction becomes an auxiliary variable implying its two edges.
    """

    def __init__(self, frames):
        self.var_id = {}
        self.mandatory = []  # (u, v, w)
        self.mandatory_keys = set()
        self.edge_lit = {}
        self.lit_edge = [None]
        self.eq_aux = {}
        self.aux_edges = {}
        self.nvars = 0
        self.clauses = []
        self.trivially_false = False
        for f in frames:
            self._top(f)
        self.units = sorted(self.edge_lit[k] for k in self.mandatory_keys if k in self.edge_lit)

    def node(self, v: DLVar) -> int:
        i = self.var_id.get(v)
        if i is None:
            i = self.var_id[v] = len(self.var_id)
        return i

    def _fresh(self, edge=None) -> int:
        self.nvars += 1
        self.lit_edge.append(edge)
        return self.nvars

    def edge_literal(self, key) -> int:
        lit = self.edge_lit.get(key)
        if lit is None:
            lit = self.edge_lit[key] = self._fresh(key)
        return lit

    def atom_literal(self, a: Atom) -> int:
        keys = [(self.node(u), self.node(v), w) for u, v, w in atom_edges(a)]
        if len(keys) == 1:
            return self.edge_literal(keys[0])
        lit = self.eq_aux.get(a)
        if lit is None:
            lit = self.eq_aux[a] = self._fresh()
            self.aux_edges[lit] = keys
            for k in keys:
                self.clauses.append([-lit, self.edge_literal(k)])
        return lit

    def _top(self, f):
        if isinstance(f, Atom):
            for u, v, w in atom_edges(f):
                key = (self.node(u), self.node(v), w)
                self.mandatory.append(key)
                self.mandatory_keys.add(key)
        elif isinstance(f, And):
            for g in f.args:
                self._top(g)
        else:
            self.clauses.append(self._disjuncts(f))
            if not f.args:
                self.trivially_false = True

    def _disjuncts(self, f) -> list:
        lits = []
        for g in f.args:
            if isinstance(g, Atom):
                lits.append(self.atom_literal(g))
            elif isinstance(g, Or):
                lits.extend(self._disjuncts(g))
            else:
                b = self._fresh()
                self._guarded(b, g)
                lits.append(b)
        return lits

    def _guarded(self, b: int, f):
        """Clauses for ``b -> f`` (one direction suffices without negation)."""
        if isinstance(f, Atom):
            self.clauses.append([-b, self.atom_literal(f)])
        elif isinstance(f, And):
            for g in f.args:
                self._guarded(b, g)
        else:
            self.clauses.append([-b] + self._disjuncts(f))


class _Search:
    """CDCL over the literals with the constraint graph as theory.

    Only true literals assert edges: the formulas are negation-free, so a
    false atom never has to be enforced.
    """

    def __init__(self, enc: _Encoding, extra_clauses, max_conflicts, deadline, model_guided):
        self.enc = enc
        n = enc.nvars
        self.value = [None] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason = [None] * (n + 1)
        self.trail = []
        self.trail_lim = []
        self.graph_marks = []
        self.qhead = 0
        self.clauses = []
        self.watches = {}
        self.graph = _Graph(len(enc.var_id))
        self.max_conflicts = max_conflicts
        self.deadline = deadline
        self.model_guided = model_guided
        self.conflicts = 0
        self.decisions = 0
        self.activity = [0.0] * (n + 1)
        self.bump = 1.0
        self.restarts = RESTARTS
        self.lemmas = []
        self.original = [list(c) for c in enc.clauses]
        # clauses with two or more positive literals need branching; the
        # rest are settled by propagation
        self.branch = [c for c in self.original if sum(1 for l in c if l > 0) >= 2]
        self.order = list(range(len(self.branch)))
        self.true_count = [0] * len(self.branch)
        self.pos_occ = {}
        for ci, c in enumerate(self.branch):
            for l in c:
                if l > 0:
                    self.pos_occ.setdefault(l, []).append(ci)
        self.pending_units = list(enc.units)
        self.empty_clause = enc.trivially_false
        for c in self.original:
            self._add_clause(list(c))
        for c in extra_clauses:
            self._add_clause(list(c))

    def _lit_value(self, lit):
        v = self.value[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def _watch(self, lit, ci):
        self.watches.setdefault(lit, []).append(ci)

    def _add_clause(self, c):
        c = list(dict.fromkeys(c))
        if any(-l in c for l in c):
            return None
        if not c:
            self.empty_clause = True
            return None
        if len(c) == 1:
            self.pending_units.append(c[0])
            return None
        ci = len(self.clauses)
        self.clauses.append(c)
        self._watch(c[0], ci)
        self._watch(c[1], ci)
        return ci

    def _assign(self, lit, reason):
        var = abs(lit)
        if lit > 0:
            for ci in self.pos_occ.get(lit, ()):
                self.true_count[ci] += 1
        self.value[var] = lit > 0
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        pos_occ, true_count = self.pos_occ, self.true_count
        for lit in self.trail[stop:]:
            var = abs(lit)
            if lit > 0:
                for ci in pos_occ.get(lit, ()):
                    true_count[ci] -= 1
            self.value[var] = None
            self.reason[var] = None
        del self.trail[stop:]
        self.graph.undo(self.graph_marks[lvl])
        del self.trail_lim[lvl:]
        del self.graph_marks[lvl:]
        self.qhead = min(self.qhead, len(self.trail))

    def _theory(self, p):
        edge = self.enc.lit_edge[abs(p)]
        if edge is None:
            return None
        if p < 0:
            return None
        cyc = self.graph.add(edge[0], edge[1], edge[2], p)
        if cyc is None:
            return None
        lits = sorted({t for t in cyc if isinstance(t, int)})
        fixed = frozenset(t for t in cyc if not isinstance(t, int))
        self.lemmas.append((lits, fixed))
        return [-t for t in lits]

    def _propagate(self):
        """Unit propagation plus theory assertion; returns a conflict clause or None."""
        value = self.value
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            conflict = self._theory(p)
            if conflict is not None:
                return conflict
            falselit = -p
            wl = self.watches.get(falselit)
            if not wl:
                continue
            keep = []
            i = 0
            while i < len(wl):
                ci = wl[i]
                i += 1
                c = self.clauses[ci]
                if c[0] == falselit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                fv = value[abs(first)]
                if fv is not None and fv == (first > 0):
                    keep.append(ci)
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    vk = value[abs(lk)]
                    if vk is None or vk == (lk > 0):
                        c[1], c[k] = lk, falselit
                        self._watch(lk, ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if fv is not None:
                    conflict = c
                    keep.extend(wl[i:])
                    break
                self._assign(first, ci)
            self.watches[falselit] = keep
            if conflict is not None:
                return list(conflict)
        return None

    def _analyze(self, conflict):
        seen = set()
        learnt = []
        counter = 0
        cur_level = len(self.trail_lim)
        clause = conflict
        p = None
        idx = len(self.trail) - 1
        while True:
            for q in clause:
                if p is not None and q == p:
                    continue
                var = abs(q)
                if var in seen or self.level[var] == 0:
                    continue
                seen.add(var)
                self.activity[var] += self.bump
                if self.level[var] >= cur_level:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter <= 0:
                break
            clause = self.clauses[self.reason[abs(p)]]
        learnt.insert(0, -p)
        back = 0
        if len(learnt) > 1:
            best = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = self.level[abs(learnt[1])]
        return learnt, back

    def _satisfied(self, c):
        # unassigned literals count as false, except negative ones
        for lit in c:
            v = self.value[abs(lit)]
            if lit > 0 and v is True:
                return True
            if lit < 0 and v is not True:
                return True
        return False

    def _choose(self):
        graph = self.graph
        lit_edge = self.enc.lit_edge
        aux_edges = self.enc.aux_edges
        value = self.value
        for ci in self.order:
            if self.true_count[ci]:
                continue
            c = self.branch[ci]
            if any(value[-l] is not True for l in c if l < 0):
                continue
            fallback = None
            for lit in c:
                if lit > 0 and self.value[lit] is None:
                    if not self.model_guided:
                        return lit
                    if fallback is None:
                        fallback = lit
                    e = lit_edge[lit]
                    if e is not None:
                        if graph.satisfied(*e):
                            return lit
                    elif all(graph.satisfied(*k) for k in aux_edges.get(lit, ())):
                        return lit
            if fallback is not None:
                return fallback
            raise AssertionError("falsified clause escaped propagation")
        if not all(self._satisfied(c) for c in self.original):
            raise AssertionError("clause left unsatisfied by propagation")
        return 0

    def _level0(self):
        """Mandatory edges and unit clauses; True if already inconsistent."""
        for key in self.enc.mandatory:
            if self.graph.add(key[0], key[1], key[2], key) is not None:
                return True
        for lit in self.pending_units:
            val = self._lit_value(lit)
            if val is False:
                return True
            if val is None:
                self._assign(lit, None)
        self.pending_units = []
        return self._propagate() is not None

    def solve(self) -> bool:
        if self.empty_clause or self._level0():
            return False
        restart_no = 1
        next_restart = 64
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.conflicts += 1
                if not self.trail_lim:
                    return False
                if self.max_conflicts is not None and self.conflicts > self.max_conflicts:
                    raise ResourceLimit(f"conflict budget {self.max_conflicts} exhausted")
                if self.deadline is not None and time.perf_counter() > self.deadline:
                    raise ResourceLimit("deadline passed during search")
                learnt, back = self._analyze(conflict)
                self.bump /= 0.95
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._assign(learnt[0], self._add_clause(learnt))
                continue
            if self.restarts and self.conflicts >= next_restart:
                restart_no += 1
                next_restart = self.conflicts + 64 * _luby(restart_no)
                self._cancel_until(0)
                act, branch = self.activity, self.branch
                self.order.sort(key=lambda ci: -max(act[abs(l)] for l in branch[ci]))
                continue
            lit = self._choose()
            if lit == 0:
                return True
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self.graph_marks.append(self.graph.mark())
            self._assign(lit, None)

    def model(self) -> dict:
        g = self.graph
        vals = _concrete(g.pi, list(g.all_edges()))
        inv = {i: v for v, i in self.enc.var_id.items()}
        zid = self.enc.var_id.get(ZERO_VAR)
        shift = 0 if zid is None else vals[zid]
        return {inv[i]: as_scalar(val - shift) for i, val in enumerate(vals) if inv[i] != ZERO_VAR}


def solve(frames: Sequence, max_conflicts=None, deadline=None, model_guided=True,
          lemmas=(), stats=None) -> SatVerdict:
    """One-shot satisfiability check of the conjunction of ``frames``.

    ``lemmas`` are theory conflicts from earlier checks; those whose edges
    all occur in this stack are added as blocking clauses.
    """
    enc = _Encoding(frames)
    extra = []
    for lemma in lemmas:
        clause = []
        for u, v, w in lemma:
            iu, iv = enc.var_id.get(u), enc.var_id.get(v)
            if iu is None or iv is None:
                break
            key = (iu, iv, w)
            lit = enc.edge_lit.get(key)
            if lit is not None:
                clause.append(-lit)
            elif key not in enc.mandatory_keys:
                break
        else:
            if clause:
                extra.append(clause)
    search = _Search(enc, extra, max_conflicts, deadline, model_guided)
    sat = search.solve()
    if stats is not None:
        stats["conflicts"] = stats.get("conflicts", 0) + search.conflicts
        stats["decisions"] = stats.get("decisions", 0) + search.decisions
        stats["checks"] = stats.get("checks", 0) + 1
        stats["learned_lemmas"] = [_lemma(enc, lits, fixed) for lits, fixed in search.lemmas]
    if not sat:
        return SatVerdict(False)
    model = search.model()
    for f in frames:
        for v in variables(f):
            if v != ZERO_VAR:
                model.setdefault(v, 0)
    if not all(evaluate(f, model) for f in frames):
        raise AssertionError("internal model failed replay")
    return SatVerdict(True, model)


def _lemma(enc: _Encoding, lits, fixed):
    """A theory conflict as a set of ``(u, v, w)`` edges over DLVars."""
    inv = {i: v for v, i in enc.var_id.items()}
    edges = [enc.lit_edge[t] for t in lits] + list(fixed)
    return frozenset((inv[u], inv[v], w) for u, v, w in edges)


class _Stack:
    """Assertion stack with push/pop semantics and declared stage variables."""

    def __init__(self):
        self.frames = []
        self.declared = set()

    def declare(self, stage: int, n: int):
        """Fresh state variables ``x1..xn`` at ``stage``."""
        for i in range(1, n + 1):
            self.declared.add(DLVar(i, stage))

    def push(self, f):
        self.frames.append(f)

    def pop(self):
        if not self.frames:
            raise IndexError("pop on an empty assertion stack")
        self.frames.pop()

    def set_frame(self, index: int, f):
        self.frames[index] = f

    def __len__(self):
        return len(self.frames)


class SolverContext(_Stack):
    """Internal solver behind an incremental push/pop interface.

    Theory conflicts learned by a check are kept with the deepest frame that
    contributed one of their edges and dropped when that frame is popped or
    replaced; later checks reuse them as blocking clauses.
    """

    def __init__(self, max_conflicts: Optional[int] = None, model_guided: bool = True):
        super().__init__()
        self.max_conflicts = max_conflicts
        self.model_guided = model_guided
        self.deadline = None
        self.stats = {}
        self._lemmas = []  # per frame

    def push(self, f):
        super().push(f)
        self._lemmas.append([])

    def pop(self):
        super().pop()
        self._lemmas.pop()

    def set_frame(self, index: int, f):
        super().set_frame(index, f)
        for k in range(index, len(self._lemmas)):
            self._lemmas[k] = []

    def check(self) -> SatVerdict:
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise ResourceLimit("deadline passed before check")
        lemmas = [l for frame in self._lemmas for l in frame]
        info = {}
        verdict = solve(self.frames, self.max_conflicts, self.deadline, self.model_guided, lemmas, info)
        for key in ("conflicts", "decisions", "checks"):
            self.stats[key] = self.stats.get(key, 0) + info.get(key, 0)
        learned = info.get("learned_lemmas")
        if learned:
            origin = {}
            for k, f in enumerate(self.frames):
                for a in atoms(f):
                    for u, v, w in atom_edges(a):
                        origin.setdefault((u, v, w), k)
            for lemma in learned:
                self._lemmas[max(origin[e] for e in lemma)].append(lemma)
        return verdict


# ---------------------------------------------------------------- SMT-LIB2


def _smt_symbol(v: DLVar) -> str:
    return f"|{v.name}|"


def _smt_const(c, integer: bool) -> str:
    c = Fraction(c)
    neg = c < 0
    c = abs(c)
    if integer:
        body = str(c.numerator)
    elif c.denominator == 1:
        body = f"{c.numerator}.0"
    else:
        body = f"(/ {c.numerator}.0 {c.denominator}.0)"
    return f"(- {body})" if neg else body


def _smt_term(f, integer: bool) -> str:
    if isinstance(f, Atom):
        op = {">=": ">=", ">": ">", "=": "="}[f.rel]
        return f"({op} (- {_smt_symbol(f.lhs)} {_smt_symbol(f.rhs)}) {_smt_const(f.c, integer)})"
    if isinstance(f, And):
        if not f.args:
            return "true"
        if len(f.args) == 1:
            return _smt_term(f.args[0], integer)
        return "(and " + " ".join(_smt_term(a, integer) for a in f.args) + ")"
    if not f.args:
        return "false"
    if len(f.args) == 1:
        return _smt_term(f.args[0], integer)
    return "(or " + " ".join(_smt_term(a, integer) for a in f.args) + ")"


def _all_integral(frames) -> bool:
    return all(Fraction(a.c).denominator == 1 for f in frames for a in atoms(f))


def to_smtlib(frames: Sequence, declared=(), integer: bool = False) -> str:
    """SMT-LIB2 script asserting every frame, then ``check-sat``/``get-model``.

    Real difference logic (``QF_RDL``) unless ``integer`` is requested and
    every constant is integral, in which case ``QF_IDL`` is used.
    """
    integer = integer and _all_integral(frames)
    sort = "Int" if integer else "Real"
    names = set(declared)
    for f in frames:
        names |= variables(f)
    lines = [
        "(set-option :produce-models true)",
        f"(set-logic {'QF_IDL' if integer else 'QF_RDL'})",
    ]
    for v in sorted(names, key=lambda v: (v.stage, v.index)):
        lines.append(f"(declare-fun {_smt_symbol(v)} () {sort})")
    if ZERO_VAR in names:
        lines.append(f"(assert (= {_smt_symbol(ZERO_VAR)} {_smt_const(0, integer)}))")
    for f in frames:
        lines.append(f"(assert {_smt_term(f, integer)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


_TOKEN = re.compile(r'\s*(?:(\()|(\))|(\|[^|]*\|)|("(?:[^"]|"")*")|([^\s()|";]+)|(;[^\n]*))')


def parse_sexprs(text: str) -> list:
    """Parse s-expressions into nested lists of string atoms."""
    stack = [[]]
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SolverParseError(f"unexpected solver output near {text[pos:pos + 30]!r}")
        pos = m.end()
        lp, rp, quoted, string, sym, comment = m.groups()
        if comment:
            continue
        if lp:
            stack.append([])
        elif rp:
            if len(stack) == 1:
                raise SolverParseError("unbalanced ')' in solver output")
            done = stack.pop()
            stack[-1].append(done)
        elif quoted:
            stack[-1].append(quoted[1:-1])
        elif string:
            stack[-1].append(string)
        elif sym:
            stack[-1].append(sym)
    if len(stack) != 1:
        raise SolverParseError("unbalanced '(' in solver output")
    return stack[0]


def _eval_value(term):
    if isinstance(term, str):
        try:
            return Fraction(term)
        except ValueError:
            raise SolverParseError(f"cannot read model value {term!r}") from None
    if not term:
        raise SolverParseError("empty model value")
    head, *args = term
    vals = [_eval_value(a) for a in args]
    if head == "-" and len(vals) == 1:
        return -vals[0]
    if head == "-":
        out = vals[0]
        for v in vals[1:]:
            out -= v
        return out
    if head == "/" and len(vals) == 2:
        return vals[0] / vals[1]
    if head == "+":
        return sum(vals, Fraction(0))
    if head == "to_real" and len(vals) == 1:
        return vals[0]
    raise SolverParseError(f"unsupported model term {term!r}")


_NAME = re.compile(r"^x(\d+)(?:@(-?\d+))?$")


def _parse_var(name: str) -> Optional[DLVar]:
    m = _NAME.match(name)
    if not m:
        return None
    idx = int(m.group(1))
    return DLVar(idx, int(m.group(2) or 0))


def parse_solver_output(text: str, frames: Sequence = ()) -> SatVerdict:
    items = parse_sexprs(text)
    if not items:
        raise SolverParseError("solver produced no output")
    head = items[0]
    if head == "unsat":
        return SatVerdict(False)
    if head == "unknown":
        raise SolverUnknown("solver answered unknown")
    if head != "sat":
        raise SolverParseError(f"expected sat/unsat, got {head!r}")
    if len(items) < 2 or not isinstance(items[1], list):
        raise SolverParseError("sat without a model")
    body = items[1]
    if body and body[0] == "model":
        body = body[1:]
    model = {}
    for entry in body:
        if not (isinstance(entry, list) and len(entry) == 5 and entry[0] == "define-fun"):
            continue
        var = _parse_var(entry[1])
        if var is None or var == ZERO_VAR:
            continue
        model[var] = as_scalar(_eval_value(entry[4]))
    for f in frames:
        for v in variables(f):
            if v != ZERO_VAR:
                model.setdefault(v, 0)
    for f in frames:
        if not evaluate(f, model):
            raise SolverParseError("external model does not satisfy the asserted formulas")
    return SatVerdict(True, model)


DEFAULT_SOLVER_CMD = "z3 -in -smt2"


def check_external(frames: Sequence, solver_cmd: str = DEFAULT_SOLVER_CMD, declared=(),
                   integer: bool = False, timeout: Optional[float] = None):
    """Run an SMT-LIB2 solver on ``frames``; returns ``(verdict, script)``."""
    script = to_smtlib(frames, declared, integer)
    try:
        proc = subprocess.run(
            shlex.split(solver_cmd), input=script, capture_output=True, text=True, timeout=timeout
        )
    except (OSError, subprocess.SubprocessError) as exc:
        raise SolverProcessError(f"could not run {solver_cmd!r}: {exc}") from exc
    out = proc.stdout.strip()
    if not out:
        raise SolverProcessError(
            f"{solver_cmd!r} exited with {proc.returncode} and no output: {proc.stderr.strip()}"
        )
    return parse_solver_output(out, frames), script


class ExternalContext(_Stack):
    """Same stack interface, each check re-sent whole to an external solver."""

    def __init__(self, solver_cmd: str = DEFAULT_SOLVER_CMD, integer: bool = False,
                 timeout: Optional[float] = None):
        super().__init__()
        self.solver_cmd = solver_cmd
        self.integer = integer
        self.timeout = timeout
        self.last_script = None
        self.stats = {}
        self.deadline = None

    def check(self) -> SatVerdict:
        timeout = self.timeout
        if self.deadline is not None:
            left = self.deadline - time.perf_counter()
            if left <= 0:
                raise ResourceLimit("deadline passed before external check")
            timeout = left if timeout is None else min(timeout, left)
        try:
            verdict, script = check_external(
                self.frames, self.solver_cmd, self.declared, self.integer, timeout
            )
        except SolverProcessError as exc:
            if isinstance(exc.__cause__, subprocess.TimeoutExpired):
                raise ResourceLimit("external solver timed out") from exc
            raise
        self.last_script = script
        self.stats["checks"] = self.stats.get("checks", 0) + 1
        return verdict


def external_available(solver_cmd: str = DEFAULT_SOLVER_CMD) -> bool:
    try:
        verdict, _ = check_external([TRUE], solver_cmd, timeout=10)
    except ExternalSolverError:
        return False
    return verdict.sat
