"""Branch-and-bound driver over relaxation roots.

Complete mode runs the root queue as a stack (DFS) and proves optimality by
draining it; incomplete (anytime) mode orders roots by the clipped loss of
their warm-started factors and reports every incumbent improvement as it
happens.  Either way, each popped root is solved by sweeps, rounded, and then
expanded by one depth-limited DFS whose interior nodes are priced with the
warm-started bound pair: prune on the dual ceiling, recurse on a primal that
already ties the incumbent, and emit everything else as a new root.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from .bounds import BoundPair, Decision, ShiftLedger, ceil_bound, decide
from .config import SolverConfig
from .instance import (ACTIVE, FREE, TRUE, Instance, NodeState, WatchedStack,
                       assign, evaluate, unassign_to)
from .rounding import best_rounding, rounding_budget
from .sdp import ZCache, default_rank, init_factor, solve

OPTIMUM = "OPTIMUM"
TIMEOUT = "TIMEOUT"

COMPLETE = "complete"
INCOMPLETE = "incomplete"


@dataclass(frozen=True)
class SearchNode:
    """Queue entry: assignment path from the original root plus its bounds."""

    path: tuple
    primal: float
    dual: float
    priority: float
    depth: int


@dataclass(frozen=True)
class Incumbent:
    assignment: tuple
    unsat: int
    found_at: float


@dataclass
class SearchStats:
    nodes_popped: int = 0
    sdp_solves: int = 0
    sweeps_total: int = 0
    prunes_by_dual: int = 0
    expands_by_primal: int = 0
    pruned_at_pop: int = 0
    leaf_pops: int = 0
    roundings: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "nodes_popped", "sdp_solves", "sweeps_total", "prunes_by_dual",
            "expands_by_primal", "pruned_at_pop", "leaf_pops", "roundings",
            "wall_time")}


class Searcher:
    """Single-owner engine: one state, one factor workspace, one queue."""

    def __init__(self, instance: Instance, config: SolverConfig, emit=None):
        self.inst = instance
        self.cfg = config
        self.emit = emit
        n = instance.num_vars
        self.k = config.rank if config.rank else default_rank(max(n, 1))
        self.rng = np.random.default_rng(config.seed)
        self.state = NodeState(instance)
        self.ws = WatchedStack(instance)
        self.factor = init_factor(n, self.k, self.rng)
        self.zcache = ZCache(instance, self.k)
        self.order = list(range(1, n + 1))
        self.best: Incumbent | None = None
        self.best_unsat = instance.num_clauses + instance.empty_count + 1
        self.stats = SearchStats()
        self.t0 = time.monotonic()
        self.deadline = (None if config.time_limit is None
                         else self.t0 + config.time_limit)
        self.cur_path: list = []
        self.mode = COMPLETE

    # -- plumbing ----------------------------------------------------------

    def out_of_time(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline

    def move_to(self, path) -> None:
        """Rewind to the longest common prefix, then assign the remainder."""
        common = 0
        for ours, theirs in zip(self.cur_path, path):
            if ours != theirs:
                break
            common += 1
        unassign_to(self.state, self.ws, common)
        del self.cur_path[common:]
        for var, value in path[common:]:
            assign(self.state, self.ws, var, value)
            self.cur_path.append((var, value))

    def update_best(self, values, unsat: int) -> None:
        if unsat >= self.best_unsat:
            return
        recheck = evaluate(self.inst, values)
        assert recheck == unsat, "incumbent failed re-evaluation"
        self.best_unsat = unsat
        self.best = Incumbent(tuple(values), unsat,
                              time.monotonic() - self.t0)
        if self.emit is not None:
            self.emit(self.best)

    def clipped_loss(self) -> float:
        """Best-first priority: base_unsat plus positive active losses only."""
        z = self.zcache.z
        lengths = self.inst.lengths
        terms = []
        for j, st in enumerate(self.state.clause_status):
            if st == ACTIVE:
                zj = z[j]
                loss = ((float(zj @ zj) - (lengths[j] - 1) ** 2)
                        / (4.0 * lengths[j]))
                if loss > 0.0:
                    terms.append(loss)
        return self.state.base_unsat + math.fsum(terms)

    # -- per-root work -----------------------------------------------------

    def solve_root(self):
        self.zcache.rebuild(self.state, self.factor)
        res = solve(self.state, self.factor, self.zcache, eps=self.cfg.eps,
                    max_sweeps=self.cfg.max_sweeps, order=self.order,
                    deadline=self.deadline)
        self.stats.sdp_solves += 1
        self.stats.sweeps_total += res.sweeps_used
        return res

    def round_root(self) -> None:
        budget = rounding_budget(self.state.free_count, self.cfg.rounding_c)
        if budget == 0:
            self.update_best(list(self.state.assignment),
                             self.state.base_unsat)
            return
        values, unsat = best_rounding(self.factor, self.state, budget,
                                      self.rng)
        self.stats.roundings += budget
        self.update_best(values, unsat)

    def reorder(self, cert) -> None:
        """Resolution order: free variables by descending multiplier."""
        lam = cert.lam
        free = self.state.free_vars()
        free.sort(key=lambda v: (-lam[v], v))
        assigned = [v for v in self.order
                    if self.state.assignment[v] != FREE]
        self.order = free + assigned

    def expand_root(self, res, node_depth: int) -> list[SearchNode]:
        """Depth-limited DFS below the solved root.

        Branches over the top depth_limit free variables in resolution order,
        trying the incumbent's value first.  Interior children are priced by
        the warm-started bound pair; the frontier (depth limit, or a SOLVE
        decision) emits queue nodes, and fully assigned leaves update the
        incumbent directly.
        """
        state, ws, zc, cfg = self.state, self.ws, self.zcache, self.cfg
        ledger = ShiftLedger(res.cert)
        split_vars = [v for v in self.order
                      if state.assignment[v] == FREE][:cfg.depth_limit]
        children: list[SearchNode] = []
        obj_stack = [res.objective_unsat]
        prefer = self.best.assignment if self.best is not None else None
        incomplete = self.mode == INCOMPLETE

        def emit_child(depth: int) -> None:
            priority = self.clipped_loss() if incomplete else 0.0
            children.append(SearchNode(
                path=tuple(self.cur_path), primal=obj_stack[-1],
                dual=ledger.dual_bound(), priority=priority,
                depth=node_depth + depth))
            if cfg.transition_recorder is not None:
                cfg.transition_recorder(tuple(self.cur_path),
                                        ledger.cert_snapshot(state))

        def descend(depth: int) -> None:
            var = split_vars[depth]
            first = int(prefer[var]) if prefer is not None else TRUE
            for value in (first, -first):
                if self.out_of_time():
                    return
                moved = assign(state, ws, var, value)
                self.cur_path.append((var, value))
                ledger.apply(state, var, value, moved)
                undo, d_obj = zc.assign_update(state, self.factor, var, moved)
                obj_stack.append(obj_stack[-1] + d_obj)
                if state.free_count == 0:
                    self.update_best(list(state.assignment), state.base_unsat)
                else:
                    pair = BoundPair(primal=obj_stack[-1],
                                     dual=ledger.dual_bound())
                    if cfg.bound_recorder is not None:
                        cfg.bound_recorder(tuple(self.cur_path), pair.dual)
                    verdict = decide(pair, self.best_unsat, cfg.ceil_tol)
                    if verdict == Decision.PRUNE:
                        self.stats.prunes_by_dual += 1
                    elif depth + 1 >= len(split_vars):
                        emit_child(depth + 1)
                    elif verdict == Decision.EXPAND:
                        self.stats.expands_by_primal += 1
                        descend(depth + 1)
                    else:
                        emit_child(depth + 1)
                obj_stack.pop()
                zc.revert(undo)
                ledger.revert()
                self.cur_path.pop()
                unassign_to(state, ws, len(state.trail) - 1)

        if split_vars:
            descend(0)
        return children

    # -- drivers -----------------------------------------------------------

    def process_root(self, node: SearchNode) -> list[SearchNode]:
        """Pop-time handling shared by both modes; returns children to push."""
        stats = self.stats
        tol = self.cfg.ceil_tol
        stats.nodes_popped += 1
        if ceil_bound(node.dual, tol) >= self.best_unsat:
            stats.pruned_at_pop += 1
            stats.prunes_by_dual += 1
            return []
        self.move_to(node.path)
        if self.state.free_count == 0:
            stats.leaf_pops += 1
            self.update_best(list(self.state.assignment),
                             self.state.base_unsat)
            return []
        res = self.solve_root()
        fresh_dual = res.cert.dual_bound
        if ceil_bound(fresh_dual, tol) >= self.best_unsat:
            stats.prunes_by_dual += 1
            return []
        self.round_root()
        # re-fire with the possibly improved incumbent; also catches the
        # bound-match case where a rounding attains the dual ceiling
        if ceil_bound(fresh_dual, tol) >= self.best_unsat:
            stats.prunes_by_dual += 1
            return []
        self.reorder(res.cert)
        return self.expand_root(res, node.depth)

    def run_complete(self) -> str:
        self.mode = COMPLETE
        stack = [SearchNode((), math.inf, 0.0, 0.0, 0)]
        status = OPTIMUM
        while stack:
            if self.out_of_time():
                status = TIMEOUT
                break
            node = stack.pop()
            for child in reversed(self.process_root(node)):
                stack.append(child)
        self.stats.wall_time = time.monotonic() - self.t0
        return status

    def run_incomplete(self) -> str:
        self.mode = INCOMPLETE
        counter = 0
        heap = [(0.0, counter, SearchNode((), math.inf, 0.0, 0.0, 0))]
        status = OPTIMUM
        while heap:
            if self.out_of_time():
                status = TIMEOUT
                break
            _, _, node = heapq.heappop(heap)
            for child in self.process_root(node):
                counter += 1
                heapq.heappush(heap, (child.priority, counter, child))
        self.stats.wall_time = time.monotonic() - self.t0
        return status


def solve_complete(instance: Instance, config: SolverConfig | None = None,
                   on_improve=None):
    """DFS to a proved optimum (or the best incumbent at the time limit)."""
    engine = Searcher(instance, config or SolverConfig(), emit=on_improve)
    status = engine.run_complete()
    return engine.best, status, engine.stats


def solve_incomplete(instance: Instance, config: SolverConfig | None = None,
                     emit=None):
    """Anytime best-first search; emit fires on every incumbent improvement."""
    engine = Searcher(instance, config or SolverConfig(), emit=emit)
    engine.run_incomplete()
    return engine.best, engine.stats
