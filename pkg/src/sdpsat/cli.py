"""Command-line front end: solve, generate, bench.

Solve output follows the evaluation text protocol: one "o <unsat>" line per
incumbent improvement, a final "s OPTIMUM FOUND" / "s UNKNOWN" status line,
then "v <literals>" for the best assignment.  Stats go to stderr so stdout
stays machine-readable.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from .config import SolverConfig
from .generate import random_clauses, render_dimacs
from .instance import Instance, ParseError, parse_dimacs
from .oracle import BRUTE_FORCE_CAP, brute_force
from .search import OPTIMUM, solve_complete, solve_incomplete

BENCH_COLUMNS = ["kind", "name", "n", "m", "mode", "best_unsat",
                 "oracle_unsat", "proved", "time_to_best", "time_total",
                 "nodes", "sdp_solves", "ratio"]


def _seed_from(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SDPSAT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            print(f"ignoring bad SDPSAT_SEED={env!r}", file=sys.stderr)
    return 0


def _config_from(args, time_limit=None) -> SolverConfig:
    return SolverConfig(eps=args.eps, rank=args.rank, seed=_seed_from(args),
                        depth_limit=args.depth_limit,
                        rounding_c=args.rounding_c, time_limit=time_limit)


def _load_instance(path: str) -> Instance:
    return parse_dimacs(Path(path).read_text())


def cmd_solve(args) -> int:
    try:
        instance = _load_instance(args.input)
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"parse error in {args.input}: {exc}", file=sys.stderr)
        return 2
    config = _config_from(args, time_limit=args.timeout)

    def emit(incumbent):
        print(f"o {incumbent.unsat}", flush=True)

    if args.mode == "complete":
        best, status, stats = solve_complete(instance, config,
                                             on_improve=emit)
        proved = status == OPTIMUM
    else:
        best, stats = solve_incomplete(instance, config, emit=emit)
        proved = False
    print("s OPTIMUM FOUND" if proved else "s UNKNOWN", flush=True)
    if best is not None:
        lits = (str(v if best.assignment[v] > 0 else -v)
                for v in range(1, instance.num_vars + 1))
        print("v " + " ".join(lits), flush=True)
    for key, value in stats.as_dict().items():
        print(f"stats {key}={value}", file=sys.stderr)
    return 0 if best is not None else 1


def cmd_generate(args) -> int:
    if args.length > args.n:
        print("clause length exceeds variable count", file=sys.stderr)
        return 2
    rng = np.random.default_rng(_seed_from(args))
    clauses = random_clauses(args.n, args.m, args.length, rng)
    text = render_dimacs(args.n, clauses)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _bench_inputs(args):
    """(name, instance) pairs from a directory or the generator settings."""
    if args.dir:
        paths = sorted(p for p in Path(args.dir).iterdir()
                       if p.suffix in (".cnf", ".wcnf", ".dimacs"))
        return [(p.name, parse_dimacs(p.read_text())) for p in paths]
    if args.gen_count:
        base_seed = _seed_from(args)
        out = []
        for i in range(args.gen_count):
            rng = np.random.default_rng(base_seed + i)
            clauses = random_clauses(args.gen_n, args.gen_m, args.gen_length,
                                     rng)
            from .instance import instance_from_clauses
            name = (f"rand-n{args.gen_n}-m{args.gen_m}"
                    f"-l{args.gen_length}-s{base_seed + i}")
            out.append((name, instance_from_clauses(args.gen_n, clauses)))
        return out
    return []


def cmd_bench(args) -> int:
    try:
        inputs = _bench_inputs(args)
    except (OSError, ParseError) as exc:
        print(f"bench input error: {exc}", file=sys.stderr)
        return 2
    if not inputs:
        print("empty input set", file=sys.stderr)
        return 2
    writer = csv.DictWriter(sys.stdout, fieldnames=BENCH_COLUMNS)
    writer.writeheader()
    solved_times = []
    ratio_rows = []
    for name, instance in inputs:
        oracle_unsat = ""
        if instance.num_vars <= BRUTE_FORCE_CAP:
            oracle_unsat, _ = brute_force(instance)
        config = _config_from(args, time_limit=args.timeout)
        emits = []
        t_start = time.monotonic()
        if args.mode == "complete":
            best, status, stats = solve_complete(
                instance, config, on_improve=lambda inc: emits.append(inc))
            proved = status == OPTIMUM
        else:
            best, stats = solve_incomplete(
                instance, config, emit=lambda inc: emits.append(inc))
            proved = False
        total = time.monotonic() - t_start
        best_unsat = best.unsat if best is not None else ""
        ratio = ""
        if best is not None and oracle_unsat != "":
            sat_opt = instance.num_clauses + instance.empty_count - oracle_unsat
            sat_got = instance.num_clauses + instance.empty_count - best.unsat
            ratio = 1.0 if sat_opt == 0 else round(sat_got / sat_opt, 6)
            for inc in emits:
                got = instance.num_clauses + instance.empty_count - inc.unsat
                r = 1.0 if sat_opt == 0 else round(got / sat_opt, 6)
                ratio_rows.append({
                    "kind": "ratio", "name": name, "n": instance.num_vars,
                    "m": instance.num_clauses, "mode": args.mode,
                    "best_unsat": inc.unsat, "oracle_unsat": oracle_unsat,
                    "proved": "", "time_to_best": round(inc.found_at, 6),
                    "time_total": "", "nodes": "", "sdp_solves": "",
                    "ratio": r})
        writer.writerow({
            "kind": "instance", "name": name, "n": instance.num_vars,
            "m": instance.num_clauses, "mode": args.mode,
            "best_unsat": best_unsat, "oracle_unsat": oracle_unsat,
            "proved": proved,
            "time_to_best": round(best.found_at, 6) if best else "",
            "time_total": round(total, 6), "nodes": stats.nodes_popped,
            "sdp_solves": stats.sdp_solves, "ratio": ratio})
        if proved:
            solved_times.append((total, name))
    for rank, (t, name) in enumerate(sorted(solved_times), start=1):
        writer.writerow({
            "kind": "cactus", "name": name, "n": rank, "m": "",
            "mode": args.mode, "best_unsat": "", "oracle_unsat": "",
            "proved": True, "time_to_best": "", "time_total": round(t, 6),
            "nodes": "", "sdp_solves": "", "ratio": ""})
    for row in ratio_rows:
        writer.writerow(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdpsat",
        description="MAXSAT solving via a low-rank semidefinite relaxation "
                    "inside branch and bound")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--mode", choices=("complete", "incomplete"),
                       default="complete")
        p.add_argument("--timeout", type=float, default=None,
                       help="wall-clock limit in seconds")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (SDPSAT_SEED honored when omitted)")
        p.add_argument("--eps", type=float, default=1e-2,
                       help="relaxation precision target in unsat units")
        p.add_argument("--rank", type=int, default=None,
                       help="factor rank override")
        p.add_argument("--depth-limit", type=int, default=8)
        p.add_argument("--rounding-c", type=float, default=4.0,
                       help="rounding trials per root: c * sqrt(free)")

    p_solve = sub.add_parser("solve", help="solve one DIMACS file")
    p_solve.add_argument("input")
    solver_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("generate", help="emit a random instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--length", type=int, default=2, choices=(1, 2, 3))
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("-o", "--output", default=None)
    p_gen.set_defaults(func=cmd_generate)

    p_bench = sub.add_parser("bench", help="run a batch and emit CSV")
    p_bench.add_argument("--dir", default=None,
                         help="directory of DIMACS files")
    p_bench.add_argument("--gen-count", type=int, default=0,
                         help="generate this many random instances instead")
    p_bench.add_argument("--gen-n", type=int, default=16)
    p_bench.add_argument("--gen-m", type=int, default=64)
    p_bench.add_argument("--gen-length", type=int, default=2)
    solver_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
