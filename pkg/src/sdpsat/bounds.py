"""Expand/prune bounds for subproblems, warm-started from a solved parent.

Primal side: the parent's free columns are already feasible for the child, so
the child objective after the coefficient moves is an upper bound on the
child's relaxation optimum.

Dual side: assigning variables only moves clause coefficients into the truth
row/column of the cost matrix (entries delta_i per free column i), except that
a clause dropped from the active set with f >= 2 free variables left also
removes its free-free pair coefficients.  Shifting the parent multipliers by

    xi_0 = ||delta||_1,   xi_i = |delta_i| + eta_i,
    eta_i = (f - 1) / (4 n_j)  summed over dropped clauses containing i,

adds a diagonally dominant (hence PSD) matrix on top of the change, so the
shifted certificate stays feasible for the child without a new solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .instance import (ACTIVE, FALSIFIED, FREE, SATISFIED, NodeState,
                       WatchedStack, assign, unassign_to)
from .sdp import DualCert, Factor, ZCache, objective


class Decision(Enum):
    PRUNE = "prune"
    EXPAND = "expand"
    SOLVE = "solve"


@dataclass
class BoundPair:
    primal: float
    dual: float


def ceil_bound(x: float, tol: float = 1e-6) -> int:
    """Integer ceiling with a guard against float noise at the boundary."""
    return math.ceil(x - tol)


def decide(bounds: BoundPair, best_known: int, tol: float = 1e-6) -> Decision:
    """Prune if the dual ceiling meets the incumbent; expand while the primal
    shows the subtree cannot be pruned by its own solve; otherwise solve."""
    if ceil_bound(bounds.dual, tol) >= best_known:
        return Decision.PRUNE
    if bounds.primal <= best_known:
        return Decision.EXPAND
    return Decision.SOLVE


@dataclass
class StepShift:
    """Coefficient movement caused by one assignment (state already updated).

    delta_entries hold the signed change of the truth-row coefficient c_{0i}
    per still-free variable i; eta_entries the dropped-clause compensation;
    d_diag / d_offset the change of the folded diagonal and of the constant
    offset (base_unsat minus per-clause loss constants).
    """

    delta_entries: list
    eta_entries: list
    d_diag: float
    d_offset: float


def collect_shift(state: NodeState, var: int, value: int, moved) -> StepShift:
    """Derive the StepShift for an assignment from its transition list."""
    inst = state.instance
    assignment = state.assignment
    delta_entries: list[tuple[int, float]] = []
    eta_entries: list[tuple[int, float]] = []
    d_diag = 0.0
    d_offset = 0.0
    for j, sign, new_status in moved:
        cl = inst.clauses[j]
        L = cl.length
        w = 1.0 / (4.0 * L)
        if new_status == ACTIVE:
            # literal went false: s0 absorbed -1, still active
            s0_new = state.s0[j]
            s0_old = s0_new + 1
            coeff = float(value * sign) * w
            for lit in cl.lits:
                v = abs(lit)
                if assignment[v] != FREE:
                    continue
                delta_entries.append((v, coeff if lit > 0 else -coeff))
            d_diag += (s0_new * s0_new - s0_old * s0_old - 1) * w
        elif new_status == SATISFIED:
            s0_old = state.s0[j] - 1
            free_lits = [(abs(lit), 1.0 if lit > 0 else -1.0)
                         for lit in cl.lits if assignment[abs(lit)] == FREE]
            f = len(free_lits)
            for v, s in free_lits:
                delta_entries.append((v, -s0_old * s * w))
                if f >= 2:
                    eta_entries.append((v, (f - 1) * w))
            d_diag -= (s0_old * s0_old + f + 1) * w
            d_offset += (L - 1) ** 2 * w
        else:  # FALSIFIED: the assigned variable was the clause's last free one
            s0_old = state.s0[j] + 1
            d_diag -= (s0_old * s0_old + 1) * w
            d_offset += 1.0 + (L - 1) ** 2 * w
    return StepShift(delta_entries, eta_entries, d_diag, d_offset)


def delta_vector(state: NodeState, ws: WatchedStack, assignments):
    """Accumulated (delta, eta) for a multi-variable child delta.

    Assigns, collects, and rolls back; signed delta entries telescope across
    the steps, and entries of variables assigned along the way drop out (their
    columns leave the child's problem).
    """
    mark = state.mark()
    delta: dict[int, float] = {}
    eta: dict[int, float] = {}
    for var, value in assignments:
        moved = assign(state, ws, var, value)
        shift = collect_shift(state, var, value, moved)
        for v, d in shift.delta_entries:
            delta[v] = delta.get(v, 0.0) + d
        for v, e in shift.eta_entries:
            eta[v] = eta.get(v, 0.0) + e
        delta.pop(var, None)
        eta.pop(var, None)
    unassign_to(state, ws, mark)
    return delta, eta


def dual_init(parent_cert: DualCert, delta: dict, eta: dict,
              child_state: NodeState) -> DualCert:
    """Feasible child certificate: parent multipliers plus the xi shift.

    Multipliers of newly assigned columns are masked to zero -- their rows
    leave the child's cost matrix (principal submatrix), so dropping them
    from the sum keeps feasibility and tightens the bound.  The constant
    parts (folded diagonal and offset) are recomputed for the child's active
    set; feasibility of the shifted multipliers needs no new solve.
    """
    lam = parent_cert.lam.copy()
    assignment = child_state.assignment
    for v in range(1, child_state.instance.num_vars + 1):
        if assignment[v] != FREE:
            lam[v] = 0.0
    lam[0] += math.fsum(abs(d) for d in delta.values())
    for v, d in delta.items():
        lam[v] += abs(d)
    for v, e in eta.items():
        lam[v] += e
    diag_terms = []
    const_terms = []
    inst = child_state.instance
    for j, cl in enumerate(inst.clauses):
        if child_state.clause_status[j] != ACTIVE:
            continue
        w = 1.0 / (4.0 * cl.length)
        n_free = sum(1 for lit in cl.lits if assignment[abs(lit)] == FREE)
        s0j = child_state.s0[j]
        diag_terms.append((s0j * s0j + n_free) * w)
        const_terms.append((cl.length - 1) ** 2 * w)
    return DualCert(lam=lam,
                    const_offset=child_state.base_unsat - math.fsum(const_terms),
                    diag_sum=math.fsum(diag_terms))


def primal_init(state: NodeState, ws: WatchedStack, factor: Factor,
                zcache: ZCache, assignments):
    """Assign a child delta on top of a solved parent and price it.

    Free columns are inherited from the parent factor (the copy-down warm
    start); cached z rows absorb the coefficient moves.  Returns the factor
    view and the child objective, a valid upper bound on the child's
    relaxation optimum.  Restore with unassign_to + ZCache.rebuild.
    """
    for var, value in assignments:
        moved = assign(state, ws, var, value)
        zcache.assign_update(state, factor, var, moved)
    return factor, objective(state, factor, zcache)


class ShiftLedger:
    """Running xi-shift accounting along a DFS path below one solved root.

    Maintains the child dual bound in O(1) per query and O(touched clauses)
    per assignment, with exact undo.  Matches dual_init recomputation to
    float noise (cross-checked in tests).
    """

    __slots__ = ("lam", "lam0", "sum_lam_free", "sum_abs_delta", "sum_eta",
                 "diag_sum", "const_offset", "delta", "eta", "_undo")

    def __init__(self, cert: DualCert):
        self.lam = cert.lam
        self.lam0 = float(cert.lam[0])
        self.sum_lam_free = float(cert.lam[1:].sum())
        self.sum_abs_delta = 0.0
        self.sum_eta = 0.0
        self.diag_sum = cert.diag_sum
        self.const_offset = cert.const_offset
        self.delta: dict[int, float] = {}
        self.eta: dict[int, float] = {}
        self._undo: list = []

    def apply(self, state: NodeState, var: int, value: int, moved) -> None:
        shift = collect_shift(state, var, value, moved)
        delta = self.delta
        eta = self.eta
        changed_delta = []
        changed_eta = []
        for v, d in shift.delta_entries:
            old = delta.get(v)
            changed_delta.append((v, old))
            new = (old or 0.0) + d
            delta[v] = new
            self.sum_abs_delta += abs(new) - abs(old or 0.0)
        for v, e in shift.eta_entries:
            old = eta.get(v)
            changed_eta.append((v, old))
            eta[v] = (old or 0.0) + e
            self.sum_eta += e
        popped_delta = delta.pop(var, None)
        if popped_delta is not None:
            self.sum_abs_delta -= abs(popped_delta)
        popped_eta = eta.pop(var, None)
        if popped_eta is not None:
            self.sum_eta -= popped_eta
        lam_var = float(self.lam[var])
        self.sum_lam_free -= lam_var
        self.diag_sum += shift.d_diag
        self.const_offset += shift.d_offset
        self._undo.append((var, changed_delta, changed_eta, popped_delta,
                           popped_eta, lam_var, shift.d_diag, shift.d_offset))

    def revert(self) -> None:
        (var, changed_delta, changed_eta, popped_delta, popped_eta,
         lam_var, d_diag, d_offset) = self._undo.pop()
        self.diag_sum -= d_diag
        self.const_offset -= d_offset
        self.sum_lam_free += lam_var
        if popped_eta is not None:
            self.eta[var] = popped_eta
            self.sum_eta += popped_eta
        if popped_delta is not None:
            self.delta[var] = popped_delta
            self.sum_abs_delta += abs(popped_delta)
        for v, old in reversed(changed_eta):
            if old is None:
                self.sum_eta -= self.eta.pop(v)
            else:
                self.sum_eta += old - self.eta[v]
                self.eta[v] = old
        for v, old in reversed(changed_delta):
            if old is None:
                self.sum_abs_delta -= abs(self.delta.pop(v))
            else:
                self.sum_abs_delta += abs(old) - abs(self.delta[v])
                self.delta[v] = old

    def dual_bound(self) -> float:
        return (-(self.lam0 + self.sum_lam_free
                  + 2.0 * self.sum_abs_delta + self.sum_eta)
                + self.diag_sum + self.const_offset)

    def cert_snapshot(self, state: NodeState) -> DualCert:
        """Materialize the current shifted certificate (for audits)."""
        lam = self.lam.copy()
        assignment = state.assignment
        for v in range(1, state.instance.num_vars + 1):
            if assignment[v] != FREE:
                lam[v] = 0.0
        lam[0] += self.sum_abs_delta
        for v, d in self.delta.items():
            lam[v] += abs(d)
        for v, e in self.eta.items():
            lam[v] += e
        return DualCert(lam=lam, const_offset=self.const_offset,
                        diag_sum=self.diag_sum)
