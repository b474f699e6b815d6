#!/usr/bin/env python3
"""Desk-scale exactness sweep: complete mode against the brute-force oracle.

Runs a grid of random instance sizes, checks every proved optimum against
exhaustive enumeration where the oracle reaches, and prints per-size summary
rows plus the sorted solve times (cactus data) as CSV.
"""

import argparse
import csv
import sys
import time

from sdpsat.config import SolverConfig
from sdpsat.generate import random_instance
from sdpsat.oracle import BRUTE_FORCE_CAP, brute_force
from sdpsat.search import OPTIMUM, solve_complete


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="12:48,16:64,20:80",
                    help="comma list of n:m pairs")
    ap.add_argument("--length", type=int, default=2, choices=(2, 3))
    ap.add_argument("--count", type=int, default=20,
                    help="instances per size")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--timeout", type=float, default=60.0)
    args = ap.parse_args()

    sizes = [tuple(int(x) for x in pair.split(":"))
             for pair in args.sizes.split(",")]
    writer = csv.writer(sys.stdout)
    writer.writerow(["kind", "n", "m", "count", "proved", "oracle_matches",
                     "mean_time", "times_sorted"])
    for n, m in sizes:
        proved = 0
        matches = 0
        times = []
        for i in range(args.count):
            seed = args.seed + i
            inst = random_instance(n, m, args.length, seed=seed)
            t0 = time.monotonic()
            best, status, _ = solve_complete(
                inst, SolverConfig(seed=seed, time_limit=args.timeout))
            elapsed = time.monotonic() - t0
            if status == OPTIMUM:
                proved += 1
                times.append(round(elapsed, 4))
                if n <= BRUTE_FORCE_CAP:
                    oracle_best, _ = brute_force(inst)
                    if best.unsat == oracle_best:
                        matches += 1
                    else:
                        print(f"MISMATCH n={n} m={m} seed={seed}: "
                              f"{best.unsat} vs {oracle_best}",
                              file=sys.stderr)
        writer.writerow(["summary", n, m, args.count, proved, matches,
                         round(sum(times) / len(times), 4) if times else "",
                         " ".join(str(t) for t in sorted(times))])
    return 0


if __name__ == "__main__":
    sys.exit(main())
