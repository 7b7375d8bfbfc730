"""Command line front end: ``lbdd generate | solve | verify | bench``."""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
import time

from . import io
from .core import InstanceError, evaluate_objective
from .instgen import COST_SOURCES, GenConfig, generate
from .oracle import oracle_solve
from .parallel import PHASES, ParallelConfig
from .refine import InvariantViolation
from .solver import asral_solve, greedy_solve, strict_solve

SOLVERS = ("asral", "para-asral", "strict", "greedy", "oracle")


def parse_range(text: str) -> tuple:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    return int(lo), int(hi)


def parse_list(conv):
    def parse(text):
        return [conv(x) for x in text.split(",") if x.strip()]

    return parse


def parallel_config(args) -> ParallelConfig:
    return ParallelConfig(workers=args.workers, enabled_phases=frozenset(args.parallel_phases))


def run_solver(name, instance, args):
    if name == "asral":
        return asral_solve(
            instance,
            check_invariants=args.check_invariants,
            refine_to_fixpoint=args.refine_to_fixpoint,
        )
    if name == "para-asral":
        return asral_solve(
            instance,
            mode="parallel",
            parallel=parallel_config(args),
            check_invariants=args.check_invariants,
            refine_to_fixpoint=args.refine_to_fixpoint,
        )
    if name == "strict":
        return strict_solve(instance, check_invariants=args.check_invariants)
    if name == "greedy":
        return greedy_solve(instance)
    if name == "oracle":
        from .core import SolveReport

        t = time.perf_counter()
        res = oracle_solve(instance)
        total = time.perf_counter() - t
        return SolveReport(
            res.objective,
            res.assignment,
            solver="oracle",
            timings={"index_update": 0.0, "bellman_ford": 0.0, "other": total, "total": total},
        )
    raise ValueError(f"unknown solver {name!r}")


def cmd_generate(args):
    cfg = GenConfig(
        seed=args.seed,
        n=args.n,
        ratio=args.ratio,
        theta=args.theta,
        penalty_range=args.penalty_range,
        cost_source=args.cost_source,
    )
    instance = generate(cfg)
    io.save_instance(instance, args.out)
    print(json.dumps({"out": str(args.out), "n": instance.n, "k": instance.k}))


def cmd_solve(args):
    instance = io.load_instance(args.instance)
    report = run_solver(args.solver, instance, args)
    if args.out:
        io.save_report(report, args.out, args.instance)
    summary = {"solver": report.solver, "objective": report.objective, "surcharge": report.surcharge}
    summary["timings"] = report.timings
    print(json.dumps(summary))


def cmd_verify(args):
    instance = io.load_instance(args.instance)
    asral = asral_solve(instance, check_invariants=args.check_invariants)
    strict = strict_solve(instance, check_invariants=args.check_invariants)
    opt = oracle_solve(instance)
    opt_strict = oracle_solve(instance, strict=True)
    for rep in (asral, strict):
        recomputed = evaluate_objective(instance, rep.assignment, allow_partial=rep.surcharge > 0)
        if recomputed != rep.objective:
            raise InvariantViolation(f"{rep.solver} objective does not match recount")
    result = {
        "asral": asral.objective,
        "oracle": opt.objective,
        "strict": strict.objective,
        "strict_oracle": opt_strict.objective,
        "surcharge": strict.surcharge,
        "asral_gap": asral.objective - opt.objective,
        "strict_gap": strict.objective - opt_strict.objective,
    }
    print(f"asral-oracle gap: {result['asral_gap']}")
    print(f"strict-oracle gap: {result['strict_gap']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(result, fh, indent=1)
    return 0 if result["strict_gap"] == 0 and result["asral_gap"] >= 0 else 1


def bench_rows(args):
    grid = itertools.product(args.theta, args.penalty_range, args.ratio, args.seeds)
    for theta, (lo, hi), ratio, seed in grid:
        cfg = GenConfig(
            seed=seed,
            n=args.n,
            ratio=ratio,
            theta=theta,
            penalty_range=(lo, hi),
            cost_source=args.cost_source,
        )
        instance = generate(cfg)
        for name in args.solver:
            t = time.perf_counter()
            report = run_solver(name, instance, args)
            wall = time.perf_counter() - t
            yield {
                "solver": name,
                "theta": f"{theta:g}",
                "penalty_lo": lo,
                "penalty_hi": hi,
                "ratio": f"{ratio:g}",
                "seed": seed,
                "n": instance.n,
                "k": instance.k,
                "objective": report.objective,
                "wall_time": f"{wall:.6f}",
                "index_update": f"{report.timings.get('index_update', 0.0):.6f}",
                "bellman_ford": f"{report.timings.get('bellman_ford', 0.0):.6f}",
                "other": f"{report.timings.get('other', 0.0):.6f}",
            }


def cmd_bench(args):
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=io.BENCH_COLUMNS)
        writer.writeheader()
        for row in bench_rows(args):
            writer.writerow(row)
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lbdd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def engine_flags(p):
        p.add_argument("--workers", type=int, default=4)
        p.add_argument(
            "--parallel-phases",
            type=parse_list(str),
            default=list(PHASES),
            help="comma list from: " + ",".join(PHASES),
        )
        p.add_argument("--refine-to-fixpoint", action="store_true")
        p.add_argument(
            "--check-invariants",
            action="store_true",
            help="assert no negative transfer cycle after every refinement",
        )

    g = sub.add_parser("generate", help="write a synthetic instance")
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--ratio", type=float, default=500)
    g.add_argument("--theta", type=float, default=0.7)
    g.add_argument("--penalty-range", type=parse_range, default=(1, 200))
    g.add_argument("--cost-source", choices=COST_SOURCES, default="euclidean")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--solver", choices=SOLVERS, default="asral")
    s.add_argument("--seed", type=int, default=0, help="unused; solvers are deterministic")
    s.add_argument("--out")
    engine_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="compare asral and strict against the exact oracle")
    v.add_argument("--instance", required=True)
    v.add_argument("--out")
    engine_flags(v)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="sweep generated instances, write CSV")
    b.add_argument("--n", type=int, default=5000)
    b.add_argument("--theta", type=parse_list(float), default=[0.3, 0.7])
    b.add_argument("--penalty-range", type=parse_list(parse_range), default=[(1, 200), (200, 400)])
    b.add_argument("--ratio", type=parse_list(float), default=[500, 600, 700, 800, 900])
    b.add_argument("--seeds", "--seed", type=parse_list(int), default=[0])
    b.add_argument("--solver", type=parse_list(str), default=["asral", "para-asral", "greedy"])
    b.add_argument("--cost-source", choices=COST_SOURCES, default="euclidean")
    b.add_argument("--out")
    engine_flags(b)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "solver", None) and isinstance(args.solver, list):
            unknown = set(args.solver) - set(SOLVERS)
            if unknown:
                raise ValueError(f"unknown solver(s): {sorted(unknown)}")
        status = args.func(args)
    except (InstanceError, InvariantViolation, ValueError, OSError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, InstanceError):
            record["errors"] = exc.errors
        print(json.dumps(record), file=sys.stderr)
        return 2
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
