import math

import numpy as np
import pytest

from sdpsat.config import SolverConfig
from sdpsat.generate import random_instance
from sdpsat.instance import parse_dimacs
from sdpsat.oracle import brute_force
from sdpsat.search import (OPTIMUM, TIMEOUT, Searcher, solve_complete,
                           solve_incomplete)

TRIANGLE = "p cnf 2 3\n1 2 0\n-1 2 0\n-2 0"

# v1 -> v2 -> v3 -> v4 as implications: satisfiable chain
CHAIN = "p cnf 4 3\n-1 2 0\n-2 3 0\n-3 4 0"


def test_complete_triangle():
    inst = parse_dimacs(TRIANGLE)
    best, status, stats = solve_complete(inst, SolverConfig(seed=1))
    assert status == OPTIMUM
    assert best.unsat == 1
    assert stats.nodes_popped >= 1


def test_complete_satisfiable_chain():
    inst = parse_dimacs(CHAIN)
    best, status, stats = solve_complete(inst, SolverConfig(seed=2))
    assert status == OPTIMUM
    assert best.unsat == 0


def test_complete_matches_oracle_random_batch():
    for seed in range(30):
        inst = random_instance(16, 64, 2, seed=seed)
        best, status, _ = solve_complete(inst, SolverConfig(seed=seed))
        oracle_best, _ = brute_force(inst)
        assert status == OPTIMUM
        assert best.unsat == oracle_best, f"seed {seed}"


def test_complete_max3sat_small_batch():
    for seed in range(10):
        inst = random_instance(12, 50, 3, seed=seed + 40)
        best, status, _ = solve_complete(inst, SolverConfig(seed=seed))
        oracle_best, _ = brute_force(inst)
        assert status == OPTIMUM
        assert best.unsat == oracle_best, f"seed {seed}"


def test_complete_timeout_returns_incumbent():
    inst = random_instance(60, 300, 2, seed=5)
    best, status, stats = solve_complete(
        inst, SolverConfig(seed=5, time_limit=0.5))
    assert status == TIMEOUT
    assert best is not None
    assert best.unsat >= 0


def test_complete_empty_and_trivial_instances():
    best, status, _ = solve_complete(parse_dimacs("p cnf 3 0\n"),
                                     SolverConfig(seed=0))
    assert status == OPTIMUM and best.unsat == 0
    best, status, _ = solve_complete(parse_dimacs("p cnf 0 1\n0"),
                                     SolverConfig(seed=0))
    assert status == OPTIMUM and best.unsat == 1
    best, status, _ = solve_complete(parse_dimacs("p cnf 1 2\n1 0\n-1 0"),
                                     SolverConfig(seed=0))
    assert status == OPTIMUM and best.unsat == 1


def test_incomplete_triangle_first_root_hits_optimum():
    inst = parse_dimacs(TRIANGLE)
    seen = []
    best, stats = solve_incomplete(inst, SolverConfig(seed=3),
                                   emit=lambda inc: seen.append(inc.unsat))
    assert best.unsat == 1
    assert seen[0] == 1  # found at the very first root


def test_incomplete_emissions_strictly_decreasing():
    for seed in range(10):
        inst = random_instance(20, 80, 2, seed=seed + 7)
        seen = []
        solve_incomplete(inst, SolverConfig(seed=seed),
                         emit=lambda inc: seen.append(inc.unsat))
        assert seen, "no incumbent emitted"
        assert all(a > b for a, b in zip(seen, seen[1:]))


def test_incomplete_drained_queue_reaches_oracle():
    for seed in range(15):
        inst = random_instance(14, 56, 2, seed=seed + 90)
        best, _ = solve_incomplete(inst, SolverConfig(seed=seed))
        oracle_best, _ = brute_force(inst)
        assert best.unsat == oracle_best


def test_expand_root_bound_saturation_gives_no_children():
    inst = parse_dimacs(TRIANGLE)
    engine = Searcher(inst, SolverConfig(seed=0))
    res = engine.solve_root()
    engine.round_root()
    # incumbent already equals the dual ceiling: every child prunes
    assert engine.best_unsat == math.ceil(res.cert.dual_bound - 1e-6)
    children = engine.expand_root(res, 0)
    assert children == []


def test_expand_root_depth_limit_one():
    inst = random_instance(12, 48, 2, seed=13)
    engine = Searcher(inst, SolverConfig(seed=13, depth_limit=1))
    res = engine.solve_root()
    engine.round_root()
    engine.reorder(res.cert)
    children = engine.expand_root(res, 0)
    assert len(children) <= 2
    for child in children:
        assert len(child.path) == 1
        assert child.primal >= child.dual - 1e-6


def test_expand_root_partition_when_nothing_prunes():
    inst = random_instance(10, 40, 2, seed=17)
    engine = Searcher(inst, SolverConfig(seed=17, depth_limit=4))
    res = engine.solve_root()
    engine.reorder(res.cert)
    # huge incumbent: nothing prunes, everything expands to the frontier
    engine.best_unsat = 10_000
    children = engine.expand_root(res, 0)
    assert len(children) == 16
    split = {var for child in children for var, _ in child.path}
    assert len(split) == 4
    leaves = {tuple(val for _, val in child.path) for child in children}
    assert len(leaves) == 16  # all sign patterns of the split variables


def test_node_priority_nonnegative_and_matches_dense():
    inst = random_instance(12, 48, 2, seed=19)
    engine = Searcher(inst, SolverConfig(seed=19))
    engine.mode = "incomplete"
    res = engine.solve_root()
    engine.round_root()
    engine.reorder(res.cert)
    children = engine.expand_root(res, 0)
    assert children
    for child in children:
        assert child.priority >= 0.0
    # dense recomputation of the clipped loss at the root itself
    engine.move_to(())
    engine.zcache.rebuild(engine.state, engine.factor)
    z = engine.zcache.z
    expected = engine.state.base_unsat + sum(
        max(0.0, (float(z[j] @ z[j]) - (inst.lengths[j] - 1) ** 2)
            / (4 * inst.lengths[j]))
        for j in engine.state.active_clauses())
    assert engine.clipped_loss() == pytest.approx(expected, abs=1e-9)


def test_stats_accounting_identity():
    for seed in (0, 4, 9):
        inst = random_instance(14, 56, 2, seed=seed + 30)
        _, status, stats = solve_complete(inst, SolverConfig(seed=seed))
        assert status == OPTIMUM
        assert (stats.nodes_popped
                == stats.pruned_at_pop + stats.sdp_solves + stats.leaf_pops)


def test_determinism_identical_runs():
    inst = random_instance(15, 60, 2, seed=77)
    runs = []
    for _ in range(2):
        seen = []
        best, status, stats = solve_complete(
            inst, SolverConfig(seed=5),
            on_improve=lambda inc: seen.append(inc.unsat))
        runs.append((best.assignment, best.unsat, status, seen,
                     stats.nodes_popped, stats.sdp_solves,
                     stats.sweeps_total, stats.roundings))
    assert runs[0] == runs[1]


def test_bound_recorder_hook_sound_on_small_instance():
    from sdpsat.oracle import min_unsat_completion

    checked = 0
    for seed in range(55, 59):
        inst = random_instance(12, 60, 3, seed=seed)
        records = []
        cfg = SolverConfig(seed=seed,
                           bound_recorder=lambda path, dual: records.append(
                               (path, dual)))
        _, status, _ = solve_complete(inst, cfg)
        assert status == OPTIMUM
        for path, dual in records[:50]:
            values = [0] * 13
            values[0] = 1
            for var, val in path:
                values[var] = val
            assert math.ceil(dual - 1e-6) <= min_unsat_completion(inst, values)
            checked += 1
    assert checked >= 100
