import math

import numpy as np
import pytest

from sdpsat.generate import random_instance
from sdpsat.instance import (FALSE, TRUE, NodeState, WatchedStack, assign,
                             evaluate, parse_dimacs)
from sdpsat.oracle import brute_force
from sdpsat.rounding import best_rounding, node_unsat, round_once, rounding_budget
from sdpsat.sdp import ZCache, default_rank, init_factor, solve
from tests.test_sdp import fresh_solver_state, integral_factor

TRIANGLE = "p cnf 2 3\n1 2 0\n-1 2 0\n-2 0"


def test_round_once_recovers_integral_factor():
    inst = random_instance(10, 30, 2, seed=2)
    encoded = (1,) + tuple(1 if i % 2 else -1 for i in range(10))
    factor = integral_factor(inst, encoded)
    state = NodeState(inst)
    rng = np.random.default_rng(0)
    for _ in range(20):
        values = round_once(factor, state, rng)
        assert tuple(values) == encoded


def test_round_once_sign_flip_invariance():
    inst = random_instance(8, 20, 2, seed=5)
    state = NodeState(inst)
    factor = init_factor(8, 4, seed=1)
    flipped = factor.copy()
    flipped.cols *= -1.0
    r = np.random.default_rng(3).standard_normal(4)

    def round_with(f):
        dots = f.cols @ r
        return [1 if dots[0] * d >= 0 else -1 for d in dots]

    assert round_with(factor) == round_with(flipped)


def test_round_once_keeps_assigned_values():
    inst = random_instance(6, 12, 2, seed=8)
    state, ws = NodeState(inst), WatchedStack(inst)
    assign(state, ws, 2, TRUE)
    assign(state, ws, 5, FALSE)
    factor = init_factor(6, 4, seed=0)
    rng = np.random.default_rng(1)
    for _ in range(10):
        values = round_once(factor, state, rng)
        assert values[2] == TRUE and values[5] == FALSE


def test_rounding_budget_rule():
    assert rounding_budget(0) == 0
    assert rounding_budget(100, c=4.0) == 40
    assert rounding_budget(10_000, c=4.0) // rounding_budget(100, c=4.0) == 10
    assert rounding_budget(1, c=0.1) == 1


def test_best_rounding_budget_one_equals_single_trial():
    inst = random_instance(9, 27, 2, seed=4)
    state = NodeState(inst)
    factor = init_factor(9, 5, seed=6)
    values_a = round_once(factor, state, np.random.default_rng(9))
    values_b, unsat_b = best_rounding(factor, state, 1,
                                      np.random.default_rng(9))
    assert values_a == values_b
    assert unsat_b == node_unsat(state, values_b)


def test_node_unsat_matches_full_evaluate():
    inst = random_instance(10, 40, 2, seed=12)
    state, ws = NodeState(inst), WatchedStack(inst)
    rng = np.random.default_rng(7)
    for v in (1, 4, 7):
        assign(state, ws, v, TRUE if rng.random() < 0.5 else FALSE)
    factor = init_factor(10, 5, seed=13)
    for _ in range(25):
        values = round_once(factor, state, rng)
        assert node_unsat(state, values) == evaluate(inst, values)


def test_best_rounding_at_root_optimum_triangle():
    inst = parse_dimacs(TRIANGLE)
    state, ws, factor, zc = fresh_solver_state(inst, seed=0)
    res = solve(state, factor, zc, eps=1e-6, max_sweeps=2000)
    values, unsat = best_rounding(factor, state, 100, np.random.default_rng(0))
    best, _ = brute_force(inst)
    assert unsat == best == 1
    assert unsat >= math.ceil(res.dual_bound - 1e-6)


def test_best_rounding_never_below_dual_bound():
    for seed in range(10):
        inst = random_instance(12, 40, 2, seed=seed)
        state, ws, factor, zc = fresh_solver_state(inst, seed=seed)
        res = solve(state, factor, zc, eps=1e-3)
        _, unsat = best_rounding(factor, state, 10,
                                 np.random.default_rng(seed))
        assert unsat >= math.ceil(res.dual_bound - 1e-6)
