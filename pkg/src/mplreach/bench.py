"""Random irreducible instances and the benchmark harness.

Every instance draws from its own random stream, keyed by the base seed and
``(n, m, index)``, so an instance does not depend on which other pairs or
counts were requested.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dbm import Dbm, DbmError
from .dlsolver import ResourceLimit
from .maxplus import (
    EPS,
    CapExceeded,
    MaxPlusMatrix,
    completeness_threshold,
    is_irreducible,
    transient_cyclicity,
)
from .problem import ReachSpec, ReachTimeout
from .reach_explicit import reach_explicit
from .reach_symbolic import reach_symbolic

# algorithm number -> (engine family, mode, strategy)
ALGORITHMS = {
    1: ("explicit", "forward", "sequential"),
    2: ("explicit", "forward", "oneshot"),
    3: ("explicit", "backward", "sequential"),
    4: ("explicit", "backward", "oneshot"),
    5: ("smt", "forward", "sequential"),
    6: ("smt", "forward", "oneshot"),
    7: ("smt", "backward", "sequential"),
    8: ("smt", "backward", "oneshot"),
}

PROFILES = ("fixed5", "half")


def instance_rng(seed: int, n: int, m: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, m, index)))


def gen_irreducible(n: int, m: int, value_range=(1, 20), rng=None, max_tries: int = 10000) -> MaxPlusMatrix:
    """Random irreducible matrix with exactly ``m`` finite entries per row.

    Positions are a uniform ``m``-subset of the columns in each row, values
    uniform integers in ``value_range`` (inclusive); draws are repeated until
    the precedence graph is strongly connected.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    lo, hi = value_range
    if lo > hi:
        raise ValueError("empty value range")
    rng = rng if rng is not None else np.random.default_rng()
    for _ in range(max_tries):
        rows = []
        for _ in range(n):
            cols = rng.choice(n, size=m, replace=False)
            vals = rng.integers(lo, hi + 1, size=m)
            row = [EPS] * n
            for j, v in zip(cols, vals):
                row[int(j)] = int(v)
            rows.append(tuple(row))
        A = MaxPlusMatrix(tuple(rows))
        if is_irreducible(A):
            return A
    raise CapExceeded(f"no irreducible {n}x{n} matrix with m={m} after {max_tries} draws")


def chain_length(n: int, profile: str) -> int:
    if profile == "fixed5":
        if n < 5:
            raise DbmError("the fixed5 profile needs n >= 5")
        return 5
    if profile == "half":
        if n < 2:
            raise DbmError("the half profile needs n >= 2")
        return n // 2
    raise ValueError(f"profile must be one of {PROFILES}, got {profile!r}")


def standard_sets(n: int, profile: str = "fixed5") -> tuple[Dbm, Dbm]:
    """``X = {x1 >= ... >= xp}`` and ``Y = {x1 <= ... <= xp}``."""
    p = chain_length(n, profile)
    X = Dbm.from_constraints(n, [(i, i + 1, ">=", 0) for i in range(1, p)])
    Y = Dbm.from_constraints(n, [(i, i + 1, "<=", 0) for i in range(1, p)])
    return X, Y


@dataclass
class BenchConfig:
    pairs: list
    count: int = 20
    value_range: tuple = (1, 20)
    seed: int = 1
    profile: str = "fixed5"
    algorithms: tuple = tuple(ALGORITHMS)
    cap: int = 200
    timeout: Optional[float] = None
    jobs: int = 1
    solver: str = "internal"
    solver_cmd: Optional[str] = None

    def __post_init__(self):
        self.pairs = [tuple(p) for p in self.pairs]
        for n, m in self.pairs:
            if not 1 <= m <= n:
                raise ValueError(f"pair ({n},{m}) needs 1 <= m <= n")
            chain_length(n, self.profile)
        lo, hi = self.value_range
        if lo > hi:
            raise ValueError("empty value range")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms {bad}; choose from 1..8")
        if self.count < 1:
            raise ValueError("count must be positive")


@dataclass
class InstanceResult:
    pair: tuple
    index: int
    N: int
    verdicts: dict = field(default_factory=dict)  # alg -> [reachable, step]
    times: dict = field(default_factory=dict)
    timeouts: list = field(default_factory=list)

    def consensus(self) -> Optional[bool]:
        for alg in sorted(self.verdicts):
            return self.verdicts[alg][0]
        return None

    def agrees(self) -> bool:
        seen = {(r, s if r else None) for r, s in self.verdicts.values()}
        return len(seen) <= 1


@dataclass
class BenchRow:
    pair: tuple
    mean_times: dict
    true_count: int
    threshold_mean: float
    threshold_max: int
    timeouts: dict
    disagreements: int
    instances: int


def run_algorithm(alg: int, spec: ReachSpec, deadline=None, solver="internal", solver_cmd=None):
    family, _, _ = ALGORITHMS[alg]
    if family == "explicit":
        return reach_explicit(spec, deadline=deadline)
    return reach_symbolic(spec, engine=solver, solver_cmd=solver_cmd, deadline=deadline)


def make_instance(cfg: BenchConfig, pair, index: int):
    n, m = pair
    A = gen_irreducible(n, m, cfg.value_range, instance_rng(cfg.seed, n, m, index))
    X, Y = standard_sets(n, cfg.profile)
    N = min(completeness_threshold(transient_cyclicity(A)), cfg.cap)
    return A, X, Y, N


def run_instance(cfg: BenchConfig, pair, index: int) -> InstanceResult:
    A, X, Y, N = make_instance(cfg, pair, index)
    res = InstanceResult(tuple(pair), index, N)
    for alg in cfg.algorithms:
        _, mode, strategy = ALGORITHMS[alg]
        spec = ReachSpec(A, X, Y, N, mode, strategy)
        t0 = time.perf_counter()
        deadline = None if cfg.timeout is None else t0 + cfg.timeout
        try:
            r = run_algorithm(alg, spec, deadline, cfg.solver, cfg.solver_cmd)
        except (ReachTimeout, ResourceLimit):
            res.timeouts.append(alg)
            res.times[alg] = time.perf_counter() - t0
            continue
        res.times[alg] = time.perf_counter() - t0
        res.verdicts[alg] = [r.reachable, r.step]
    return res


def _run_task(args):
    cfg, pair, index = args
    return run_instance(cfg, pair, index)


def run_instances(cfg: BenchConfig) -> list[InstanceResult]:
    tasks = [(cfg, pair, i) for pair in cfg.pairs for i in range(cfg.count)]
    if cfg.jobs and cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    order = {pair: k for k, pair in enumerate(cfg.pairs)}
    results.sort(key=lambda r: (order[r.pair], r.index))
    return results


def aggregate(cfg: BenchConfig, results: Sequence[InstanceResult]) -> list[BenchRow]:
    rows = []
    for pair in cfg.pairs:
        mine = [r for r in results if r.pair == pair]
        means = {}
        touts = {}
        for alg in cfg.algorithms:
            done = [r.times[alg] for r in mine if alg in r.verdicts]
            means[alg] = statistics.fmean(done) if done else None
            touts[alg] = sum(1 for r in mine if alg in r.timeouts)
        thresholds = [r.N for r in mine]
        rows.append(
            BenchRow(
                pair=pair,
                mean_times=means,
                true_count=sum(1 for r in mine if r.consensus()),
                threshold_mean=statistics.fmean(thresholds),
                threshold_max=max(thresholds),
                timeouts=touts,
                disagreements=sum(1 for r in mine if not r.agrees()),
                instances=len(mine),
            )
        )
    return rows


def run_benchmark(cfg: BenchConfig) -> tuple[list[BenchRow], list[InstanceResult]]:
    results = run_instances(cfg)
    return aggregate(cfg, results), results


def _fmt_time(t):
    return "" if t is None else f"{t:.4f}"


def rows_to_csv(cfg: BenchConfig, rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    header = ["(n,m)"] + [f"Alg. {a}" for a in cfg.algorithms]
    w.writerow(header + ["#true", "N*", "timeouts", "disagreements"])
    for r in rows:
        w.writerow(
            [f"({r.pair[0]},{r.pair[1]})"]
            + [_fmt_time(r.mean_times[a]) for a in cfg.algorithms]
            + [
                r.true_count,
                f"{{{r.threshold_mean:.2f},{r.threshold_max}}}",
                sum(r.timeouts.values()),
                r.disagreements,
            ]
        )
    return buf.getvalue()


def metadata(cfg: BenchConfig) -> dict:
    meta = {
        "seed": cfg.seed,
        "count": cfg.count,
        "value_range": list(cfg.value_range),
        "profile": cfg.profile,
        "cap": cfg.cap,
        "timeout": cfg.timeout,
        "solver": cfg.solver,
        "rng": "numpy PCG64 via SeedSequence(seed, spawn_key=(n, m, index))",
    }
    if cfg.profile == "half" and any(n % 2 for n, _ in cfg.pairs):
        meta["note"] = "odd n: chain length p = floor(n/2)"
    return meta


def rows_to_json(cfg: BenchConfig, rows: Sequence[BenchRow], results=None) -> str:
    out = {
        "metadata": metadata(cfg),
        "rows": [
            {
                "(n,m)": list(r.pair),
                **{f"Alg. {a}": r.mean_times[a] for a in cfg.algorithms},
                "#true": r.true_count,
                "N*": {"mean": r.threshold_mean, "max": r.threshold_max},
                "timeouts": {str(a): c for a, c in r.timeouts.items()},
                "disagreements": r.disagreements,
                "instances": r.instances,
            }
            for r in rows
        ],
    }
    if results is not None:
        out["instances"] = [asdict(r) for r in results]
    return json.dumps(out, indent=2, default=str)
