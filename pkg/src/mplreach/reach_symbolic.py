"""Reachability by difference-logic satisfiability (forward/backward,
sequential/one-shot).

Each variant keeps an assertion stack and updates it exactly as the
corresponding loop does: the sequential variants push one step formula per
iteration and swap the end-set on top, the one-shot variants overwrite the
middle frame with the formula of ``A^k``. A satisfying model is decoded into
a trajectory and replayed before it is reported.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .dbm import Dbm, intersect
from .difflogic import DLVar, TRUE, count_atoms, dbm_to_formula, encode_step, substitute_stage
from .dlsolver import DEFAULT_SOLVER_CMD, ExternalContext, SolverContext
from .maxplus import MaxPlusMatrix, as_scalar, mp_apply, mp_matmul
from .problem import ReachResult, ReachSpec

ENGINES = ("internal", "external")


def verify_witness(A: MaxPlusMatrix, X: Dbm, Y: Dbm, trajectory: Sequence[Sequence]) -> bool:
    """True iff the trajectory starts in X, ends in Y and follows ``A`` exactly."""
    if not trajectory:
        return False
    traj = [[as_scalar(v) for v in x] for x in trajectory]
    if any(len(x) != A.n for x in traj):
        return False
    if not X.contains(traj[0]) or not Y.contains(traj[-1]):
        return False
    for prev, nxt in zip(traj, traj[1:]):
        if mp_apply(A, prev) != nxt:
            return False
    return True


def _state(model: dict, stage: int, n: int) -> list:
    return [as_scalar(model.get(DLVar(i, stage), 0)) for i in range(1, n + 1)]


def _simulate(A: MaxPlusMatrix, x0: list, k: int) -> list:
    traj = [x0]
    for _ in range(k):
        traj.append(mp_apply(A, traj[-1]))
    return traj


def _make_context(engine, solver_cmd, max_conflicts, integer, model_guided):
    if engine == "internal":
        return SolverContext(max_conflicts=max_conflicts, model_guided=model_guided)
    if engine == "external":
        return ExternalContext(solver_cmd or DEFAULT_SOLVER_CMD, integer=integer)
    raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")


def reach_symbolic(
    spec: ReachSpec,
    engine: str = "internal",
    solver_cmd: Optional[str] = None,
    max_conflicts: Optional[int] = None,
    deadline: Optional[float] = None,
    integer: bool = False,
    model_guided: bool = True,
    on_check=None,
) -> ReachResult:
    """Bounded reachability by satisfiability checks over growing horizons.

    ``on_check(ctx)`` is called after every check (the external context
    exposes the emitted script as ``ctx.last_script``).
    """
    ctx = _make_context(engine, solver_cmd, max_conflicts, integer, model_guided)
    ctx.deadline = deadline
    A, X, Y, n = spec.A, spec.X, spec.Y, spec.A.n
    forward = spec.mode == "forward"
    oneshot = spec.strategy == "oneshot"
    stats = {"checks": 0, "max_atoms": 0}

    def check():
        v = ctx.check()
        stats["checks"] += 1
        stats["max_atoms"] = max(stats["max_atoms"], sum(count_atoms(f) for f in ctx.frames))
        if on_check is not None:
            on_check(ctx)
        return v

    def finish(result: ReachResult) -> ReachResult:
        stats["declared_vars"] = len(ctx.declared)
        for key in ("conflicts", "decisions"):
            if key in ctx.stats:
                stats[key] = ctx.stats[key]
        result.stats = stats
        if result.witness is not None and not verify_witness(A, X, Y, result.witness):
            raise AssertionError("decoded witness failed replay")
        return result

    if spec.check_k0 and intersect(X, Y) is not None:
        ctx.declare(0, n)
        ctx.push(dbm_to_formula(X, 0))
        ctx.push(dbm_to_formula(Y, 0))
        v = check()
        if v.sat:
            return finish(ReachResult(True, 0, witness=[_state(v.model, 0, n)]))
        ctx.pop()
        ctx.pop()

    start, goal = (X, Y) if forward else (Y, X)
    sign = 1 if forward else -1
    ctx.declare(0, n)
    ctx.push(dbm_to_formula(start, 0))

    if not oneshot:
        goal_f = dbm_to_formula(goal, 0)
        for k in range(1, spec.N + 1):
            here, prev = sign * k, sign * (k - 1)
            ctx.declare(here, n)
            if forward:
                ctx.push(encode_step(A, prev, here))
            else:
                ctx.push(encode_step(A, here, prev))
                if not check().sat:
                    return finish(ReachResult(False, k, emptied=True))
            ctx.push(substitute_stage(goal_f, 0, here))
            v = check()
            if v.sat:
                if forward:
                    traj = [_state(v.model, s, n) for s in range(0, k + 1)]
                else:
                    traj = [_state(v.model, s, n) for s in range(-k, 1)]
                return finish(ReachResult(True, k, witness=traj))
            ctx.pop()
        return finish(ReachResult(False, None))

    other = sign
    ctx.declare(other, n)
    ctx.push(TRUE)
    goal_f = substitute_stage(dbm_to_formula(goal, 0), 0, other)
    if forward:
        ctx.push(goal_f)
    power = None
    for k in range(1, spec.N + 1):
        power = A if power is None else mp_matmul(power, A)
        ctx.set_frame(1, encode_step(power, 0, 1) if forward else encode_step(power, -1, 0))
        if forward:
            v = check()
        else:
            if not check().sat:
                return finish(ReachResult(False, k, emptied=True))
            ctx.push(goal_f)
            v = check()
        if v.sat:
            x0 = _state(v.model, 0 if forward else -1, n)
            return finish(ReachResult(True, k, witness=_simulate(A, x0, k)))
        if not forward:
            ctx.pop()
    return finish(ReachResult(False, None))
