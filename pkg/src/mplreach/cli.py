"""Command-line entry point: ``mplreach {reach,pwa,spectrum,bench,gen}``."""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from .bench import (
    PROFILES,
    BenchConfig,
    gen_irreducible,
    instance_rng,
    rows_to_csv,
    rows_to_json,
    run_benchmark,
    standard_sets,
)
from .dbm import Dbm, DbmError, parse_set
from .dlsolver import DEFAULT_SOLVER_CMD, SolverError, to_smtlib
from .maxplus import (
    CapExceeded,
    MaxPlusError,
    completeness_threshold,
    format_scalar,
    is_irreducible,
    parse_matrix,
    transient_cyclicity,
)
from .problem import ReachSpec, ReachTimeout
from .pwa import pwa_generate
from .reach_explicit import reach_explicit
from .reach_symbolic import reach_symbolic

STRATEGY_NAMES = {"seq": "sequential", "sequential": "sequential", "oneshot": "oneshot"}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_set(path, n, allow_x0) -> Dbm:
    if path is None:
        return Dbm.universe(n)
    return parse_set(_read(path), n, allow_x0=allow_x0)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_reach(args) -> int:
    A = parse_matrix(_read(args.matrix))
    X = _load_set(args.initial, A.n, args.allow_x0)
    Y = _load_set(args.target, A.n, args.allow_x0)
    N = args.horizon
    if N is None:
        if not is_irreducible(A):
            raise MaxPlusError("-N is required when A is reducible")
        N = completeness_threshold(transient_cyclicity(A))
    spec = ReachSpec(A, X, Y, N, args.mode, STRATEGY_NAMES[args.strategy], args.check_k0)
    deadline = None if args.timeout is None else time.perf_counter() + args.timeout
    last_script = []

    def keep_script(ctx):
        script = getattr(ctx, "last_script", None)
        last_script[:] = [script or to_smtlib(ctx.frames, ctx.declared)]

    t0 = time.perf_counter()
    if args.engine == "explicit":
        result = reach_explicit(spec, reduce=args.reduce, deadline=deadline)
    else:
        result = reach_symbolic(
            spec,
            engine="internal" if args.engine == "smt" else "external",
            solver_cmd=args.solver_cmd,
            deadline=deadline,
            max_conflicts=args.max_conflicts,
            on_check=keep_script if args.dump_smt2 else None,
        )
    elapsed = time.perf_counter() - t0
    if args.dump_smt2 and last_script:
        Path(args.dump_smt2).write_text(last_script[0])
    out = result.to_json()
    out["N"] = N
    out["engine"] = args.engine
    out["mode"] = spec.mode
    out["strategy"] = spec.strategy
    out["seconds"] = round(elapsed, 6)
    if not args.witness:
        out.pop("witness", None)
    print(json.dumps(out, indent=2, default=str))
    return 0


def cmd_pwa(args) -> int:
    A = parse_matrix(_read(args.matrix))
    system = pwa_generate(A, full_dimensional=args.full_dimensional)
    if args.json:
        print(json.dumps({"n": A.n, "regions": [r.to_json() for r in system]}, indent=2))
        return 0
    for r in system:
        g = ",".join(str(x) for x in r.g)
        dyn = ", ".join(
            f"x{i + 1}' = x{gi} + {format_scalar(a)}" for i, (gi, a) in enumerate(zip(r.g, r.offsets))
        )
        print(f"# region g=({g}): {dyn}")
        sys.stdout.write(r.region.to_text())
        print()
    return 0


def cmd_spectrum(args) -> int:
    A = parse_matrix(_read(args.matrix))
    if not is_irreducible(A):
        print(json.dumps({"irreducible": False}))
        return 1
    p = transient_cyclicity(A, cap=args.cap)
    out = {
        "irreducible": True,
        "lambda": format_scalar(p.lam),
        "k0": p.k0,
        "c": p.c,
        "N*": completeness_threshold(p),
    }
    print(json.dumps(out, indent=2))
    return 0


def parse_pairs(text: str) -> list:
    pairs = [(int(a), int(b)) for a, b in re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", text)]
    if not pairs:
        raise ValueError(f"no (n,m) pairs found in {text!r}")
    return pairs


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        pairs=parse_pairs(args.pairs),
        count=args.count,
        value_range=(args.lo, args.hi),
        seed=args.seed,
        profile=args.profile,
        algorithms=tuple(int(a) for a in args.algorithms.split(",")),
        cap=args.cap,
        timeout=args.timeout,
        jobs=args.jobs,
        solver="external" if args.external else "internal",
        solver_cmd=args.solver_cmd,
    )
    rows, results = run_benchmark(cfg)
    if args.json:
        text = rows_to_json(cfg, rows, results if args.instances else None)
    else:
        text = rows_to_csv(cfg, rows)
    _emit(text if text.endswith("\n") else text + "\n", args.out)
    return 0


def cmd_gen(args) -> int:
    rng = instance_rng(args.seed, args.n, args.m, args.index)
    A = gen_irreducible(args.n, args.m, (args.lo, args.hi), rng)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "A.txt").write_text(A.to_text())
    written = ["A.txt"]
    if args.profile:
        X, Y = standard_sets(args.n, args.profile)
        (out / "X.set").write_text(X.to_text())
        (out / "Y.set").write_text(Y.to_text())
        written += ["X.set", "Y.set"]
    print(json.dumps({"dir": str(out), "files": written}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mplreach", description="Reachability analysis of max-plus linear systems."
    )
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reach", help="bounded reachability from X to Y")
    r.add_argument("-A", dest="matrix", required=True, help="matrix file ('-' for stdin)")
    r.add_argument("-X", dest="initial", help="initial set file (default: all of R^n)")
    r.add_argument("-Y", dest="target", help="target set file (default: all of R^n)")
    r.add_argument("-N", dest="horizon", type=int, help="step bound (default: completeness threshold)")
    r.add_argument("--engine", choices=("explicit", "smt", "smt-extern"), default="smt")
    r.add_argument("--mode", choices=("forward", "backward"), default="forward")
    r.add_argument("--strategy", choices=tuple(STRATEGY_NAMES), default="seq")
    r.add_argument("--check-k0", action="store_true", help="also test X and Y for overlap at k = 0")
    r.add_argument("--witness", action="store_true", help="include the decoded trajectory")
    r.add_argument("--solver-cmd", default=DEFAULT_SOLVER_CMD, help="external SMT-LIB2 solver command")
    r.add_argument("--dump-smt2", metavar="FILE", help="write the last SMT-LIB2 script")
    r.add_argument("--allow-x0", action="store_true", help="permit single-variable bounds via x0")
    r.add_argument("--reduce", action="store_true", help="drop subsumed DBMs from reach sets")
    r.add_argument("--max-conflicts", type=int, help="conflict budget of the internal solver")
    r.add_argument("--timeout", type=float, help="wall-clock limit in seconds")
    r.set_defaults(func=cmd_reach)

    w = sub.add_parser("pwa", help="piecewise-affine regions of A")
    w.add_argument("-A", dest="matrix", required=True)
    w.add_argument("--json", action="store_true")
    w.add_argument("--full-dimensional", action="store_true", help="keep only regions with interior")
    w.set_defaults(func=cmd_pwa)

    s = sub.add_parser("spectrum", help="eigenvalue, transient, cyclicity and threshold")
    s.add_argument("-A", dest="matrix", required=True)
    s.add_argument("--cap", type=int, default=2000, help="largest power to try")
    s.set_defaults(func=cmd_spectrum)

    b = sub.add_parser("bench", help="random-instance benchmark")
    b.add_argument("--pairs", required=True, help='e.g. "(8,3),(8,8)"')
    b.add_argument("--count", type=int, default=20)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--profile", choices=PROFILES, default="fixed5")
    b.add_argument("--algorithms", default="1,2,3,4,5,6,7,8", help="comma-separated numbers 1..8")
    b.add_argument("--lo", type=int, default=1)
    b.add_argument("--hi", type=int, default=20)
    b.add_argument("--cap", type=int, default=200, help="upper limit on the per-instance N")
    b.add_argument("--timeout", type=float, help="per-instance, per-algorithm limit in seconds")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--external", action="store_true", help="use the external solver for 5..8")
    b.add_argument("--solver-cmd", default=None)
    b.add_argument("--out", help="output file (default: stdout)")
    b.add_argument("--json", action="store_true")
    b.add_argument("--instances", action="store_true", help="with --json, include per-instance records")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="write a random irreducible instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--index", type=int, default=0)
    g.add_argument("--lo", type=int, default=1)
    g.add_argument("--hi", type=int, default=20)
    g.add_argument("--profile", choices=PROFILES, help="also write the standard X and Y sets")
    g.add_argument("--out-dir", default=".")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MaxPlusError, DbmError, ValueError, OSError) as exc:
        print(f"mplreach: error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ReachTimeout, CapExceeded) as exc:
        print(f"mplreach: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
