"""Low-rank relaxation of a (partially assigned) instance, solved in place.

Each variable is relaxed to a unit-norm column v_i in R^k, with one extra
fixed column v_0 acting as the truth direction.  An active clause j with
original length L contributes the quadratic loss

    loss_j = (||z_j||^2 - (L - 1)^2) / (4 L),
    z_j    = s0_j * v_0 + sum over free literals of sign * v_i,

which at integral columns (v_i = +/-v_0) is exactly 1 when every literal is
false, 0 when exactly one or all L literals are true, and negative otherwise.
The total objective, base_unsat plus the sum of active losses, therefore
lower-bounds the node's minimum unsat count over all completions.

Minimizing one column with the rest held fixed has a closed form: normalize
the negated weighted sum of its incident z vectors.  A sweep applies that
update to every free column in resolution order, caching z_j so each update
costs O(k) per incident clause.  At a sweep fixed point the per-column update
magnitudes ||g_i|| are feasible multipliers for the zero-diagonal cost matrix,
giving a matching lower bound (the dual certificate used for pruning).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .instance import ACTIVE, FALSIFIED, FREE, NodeState

ZERO_UPDATE_NORM = 1e-12


class Factor:
    """The factor matrix: rows 0..n are the unit columns of the relaxation."""

    __slots__ = ("cols",)

    def __init__(self, cols: np.ndarray):
        self.cols = cols

    @property
    def k(self) -> int:
        return self.cols.shape[1]

    @property
    def num_cols(self) -> int:
        return self.cols.shape[0]

    def copy(self) -> "Factor":
        return Factor(self.cols.copy())

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.cols, axis=1)


def default_rank(n: int) -> int:
    """Smallest rank strictly above sqrt(2 * columns), columns = n + 1."""
    if n < 1:
        raise ValueError("need at least one variable")
    target = 2 * (n + 1)
    r = math.isqrt(target)
    if r * r < target:
        r += 1
    return r + 1


def init_factor(n: int, k: int, seed) -> Factor:
    """Isotropic unit columns, deterministic per seed; v_0 = first basis vector."""
    if k < 2:
        raise ValueError("rank must be at least 2")
    rng = seed if isinstance(seed, np.random.Generator) \
        else np.random.default_rng(seed)
    cols = rng.standard_normal((n + 1, k))
    cols /= np.linalg.norm(cols, axis=1, keepdims=True)
    cols[0] = 0.0
    cols[0, 0] = 1.0
    return Factor(cols)


def clause_loss(z: np.ndarray, n_j: int) -> float:
    """(||z||^2 - (n_j - 1)^2) / (4 n_j) for a clause of original length n_j."""
    return (float(z @ z) - (n_j - 1) ** 2) / (4.0 * n_j)


class ZCache:
    """Per-clause running sums z_j; rows of inactive clauses are stale.

    Rows are only read for ACTIVE clauses.  During a branch-and-bound descent
    the factor columns are frozen, so a clause that leaves the active set
    keeps a row that is still correct if the clause is later reactivated by
    backtracking; rows modified in place are undone from saved copies.
    """

    __slots__ = ("instance", "k", "z")

    def __init__(self, instance, k: int):
        self.instance = instance
        self.k = k
        self.z = np.zeros((instance.num_clauses, k))

    def rebuild(self, state: NodeState, factor: Factor) -> None:
        V = factor.cols
        assignment = state.assignment
        for j, cl in enumerate(self.instance.clauses):
            if state.clause_status[j] != ACTIVE:
                continue
            zj = float(state.s0[j]) * V[0]
            for lit in cl.lits:
                v = abs(lit)
                if assignment[v] != FREE:
                    continue
                if lit > 0:
                    zj += V[v]
                else:
                    zj -= V[v]
            self.z[j] = zj

    def recompute_row(self, state: NodeState, factor: Factor,
                      j: int) -> np.ndarray:
        """Fresh z_j from scratch (consistency checks)."""
        V = factor.cols
        zj = float(state.s0[j]) * V[0]
        for lit in self.instance.clauses[j].lits:
            v = abs(lit)
            if state.assignment[v] != FREE:
                continue
            zj = zj + V[v] if lit > 0 else zj - V[v]
        return zj

    def assign_update(self, state: NodeState, factor: Factor, var: int,
                      moved):
        """Apply the coefficient move for one assignment to the cached rows.

        `moved` is the transition list returned by instance.assign (already
        applied to the state).  Returns (undo, d_objective): saved rows to
        restore on backtrack and the change in the active-loss objective.
        """
        V = factor.cols
        v0 = V[0]
        vv = V[var]
        z = self.z
        lengths = self.instance.lengths
        undo = []
        d_obj = 0.0
        for j, sign, new_status in moved:
            L = lengths[j]
            zj = z[j]
            old_loss = (float(zj @ zj) - (L - 1) ** 2) / (4.0 * L)
            if new_status == ACTIVE:
                # literal assigned false: s0 absorbed -1, drop the column term
                undo.append((j, zj.copy()))
                if sign > 0:
                    zj -= vv
                else:
                    zj += vv
                zj -= v0
                d_obj += (float(zj @ zj) - (L - 1) ** 2) / (4.0 * L) - old_loss
            elif new_status == FALSIFIED:
                d_obj += 1.0 - old_loss
            else:  # satisfied: clause leaves the active objective
                d_obj -= old_loss
        return undo, d_obj

    def revert(self, undo) -> None:
        for j, row in undo:
            self.z[j] = row


def objective(state: NodeState, factor: Factor, zcache: ZCache) -> float:
    """base_unsat plus the active-clause losses, summed exactly (fsum)."""
    z = zcache.z
    lengths = state.instance.lengths
    terms = []
    for j, st in enumerate(state.clause_status):
        if st == ACTIVE:
            zj = z[j]
            terms.append(
                (float(zj @ zj) - (lengths[j] - 1) ** 2) / (4.0 * lengths[j]))
    return state.base_unsat + math.fsum(terms)


def mixing_sweep(state: NodeState, factor: Factor, zcache: ZCache,
                 order=None) -> float:
    """One pass of closed-form column updates over the free variables.

    Every update is the exact minimizer of the objective in its block, so the
    objective is non-increasing across the pass.  Returns the objective after
    the pass.
    """
    inst = state.instance
    V = factor.cols
    z = zcache.z
    status = state.clause_status
    assignment = state.assignment
    lengths = inst.lengths
    occ = inst.occurrences
    k = factor.k
    if order is None:
        order = range(1, inst.num_vars + 1)
    for i in order:
        if assignment[i] != FREE:
            continue
        vi = V[i]
        g = np.zeros(k)
        incident = []
        for j, sign in occ[i]:
            if status[j] != ACTIVE:
                continue
            zj = z[j]
            if sign > 0:
                zj -= vi
            else:
                zj += vi
            g += (sign / (4.0 * lengths[j])) * zj
            incident.append((j, sign))
        if not incident:
            continue
        norm = float(np.linalg.norm(g))
        if norm >= ZERO_UPDATE_NORM:
            V[i] = g / -norm
            vi = V[i]
        # else: keep the previous column (any unit vector minimizes the block)
        for j, sign in incident:
            if sign > 0:
                z[j] += vi
            else:
                z[j] -= vi
    return objective(state, factor, zcache)


@dataclass
class DualCert:
    """Multipliers certifying a lower bound on the node's relaxation.

    lam covers columns 0..n (zero outside the node's support).  The bound in
    unsat units is -sum(lam) plus the folded diagonal of the cost matrix plus
    const_offset = base_unsat - sum of per-clause loss constants.
    """

    lam: np.ndarray
    const_offset: float
    diag_sum: float

    @property
    def dual_bound(self) -> float:
        return float(-self.lam.sum() + self.diag_sum + self.const_offset)


@dataclass
class SdpResult:
    objective_unsat: float
    cert: DualCert
    sweeps_used: int
    est_gap: float
    converged: bool
    trace: list = field(default_factory=list)

    @property
    def dual_bound(self) -> float:
        return self.cert.dual_bound


def dual_from_primal(state: NodeState, factor: Factor, zcache: ZCache,
                     repair: bool = True) -> DualCert:
    """Recover multipliers lam_i = ||g_i|| from the current factor.

    g_i is the negated update direction of column i (the weighted sum of its
    incident z vectors minus the column's own contribution); by
    Cauchy-Schwarz the resulting bound never exceeds the current objective.
    The norm recovery is exactly feasible only at a sweep fixed point, so by
    default the multipliers are repaired by an eigenvalue shift: any negative
    min-eigenvalue of cost + diag(lam) is added to every supported entry,
    which restores feasibility exactly and keeps ceiling-based pruning sound
    at loose convergence.  One dense symmetric eigensolve per certificate.
    """
    inst = state.instance
    n = inst.num_vars
    V = factor.cols
    z = zcache.z
    g = np.zeros((n + 1, factor.k))
    self_coeff = np.zeros(n + 1)
    diag_terms = []
    const_terms = []
    assignment = state.assignment
    for j, cl in enumerate(inst.clauses):
        if state.clause_status[j] != ACTIVE:
            continue
        L = cl.length
        w = 1.0 / (4.0 * L)
        s0j = float(state.s0[j])
        zj = z[j]
        g[0] += (s0j * w) * zj
        self_coeff[0] += s0j * s0j * w
        n_free = 0
        for lit in cl.lits:
            v = abs(lit)
            if assignment[v] != FREE:
                continue
            n_free += 1
            g[v] += (w if lit > 0 else -w) * zj
            self_coeff[v] += w
        diag_terms.append((s0j * s0j + n_free) * w)
        const_terms.append((L - 1) ** 2 * w)
    g -= self_coeff[:, None] * V
    lam = np.linalg.norm(g, axis=1)
    if repair and diag_terms:
        _repair_multipliers(state, lam)
    return DualCert(lam=lam,
                    const_offset=state.base_unsat - math.fsum(const_terms),
                    diag_sum=math.fsum(diag_terms))


def _repair_multipliers(state: NodeState, lam: np.ndarray) -> None:
    """Shift lam on the node's support so cost + diag(lam) is truly PSD."""
    inst = state.instance
    assignment = state.assignment
    index = [0] + [v for v in range(1, inst.num_vars + 1)
                   if assignment[v] == FREE]
    pos = {v: p for p, v in enumerate(index)}
    dim = len(index)
    cost = np.zeros((dim, dim))
    for j, cl in enumerate(inst.clauses):
        if state.clause_status[j] != ACTIVE:
            continue
        w = 1.0 / (4.0 * cl.length)
        entries = [(0, float(state.s0[j]))]
        for lit in cl.lits:
            v = abs(lit)
            if assignment[v] == FREE:
                entries.append((pos[v], 1.0 if lit > 0 else -1.0))
        for a, (pa, sa) in enumerate(entries):
            for pb, sb in entries[a + 1:]:
                cost[pa, pb] += sa * sb * w
                cost[pb, pa] += sa * sb * w
    cost[np.arange(dim), np.arange(dim)] = lam[index]
    min_eig = float(np.linalg.eigvalsh(cost)[0])
    if min_eig < 0.0:
        lam[index] += -min_eig


def solve(state: NodeState, factor: Factor, zcache: ZCache,
          eps: float = 1e-2, max_sweeps: int = 400, order=None,
          deadline: float | None = None) -> SdpResult:
    """Sweep until the estimated distance to the optimum drops below eps.

    The distance is estimated from the per-sweep decreases delta_t assuming a
    linear rate: gap ~ delta_t * rho / (1 - rho) with rho = delta_t /
    delta_{t-1} clamped to [0, 0.999].  If max_sweeps (or the deadline) is
    exhausted first, the result is flagged unconverged; the dual certificate
    remains a valid bound either way.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    f_cur = objective(state, factor, zcache)
    trace = [f_cur]
    if not any(st == ACTIVE for st in state.clause_status):
        return SdpResult(f_cur, dual_from_primal(state, factor, zcache),
                         0, 0.0, True, trace)
    est_gap = math.inf
    prev_delta = None
    converged = False
    sweeps = 0
    for _ in range(max_sweeps):
        if deadline is not None and time.monotonic() > deadline:
            break
        f_new = mixing_sweep(state, factor, zcache, order)
        sweeps += 1
        trace.append(f_new)
        delta = f_cur - f_new
        f_cur = f_new
        if delta <= 1e-15:
            est_gap = max(delta, 0.0)
            converged = True
            break
        if prev_delta is not None and prev_delta > 0.0:
            rho = min(max(delta / prev_delta, 0.0), 0.999)
            est_gap = delta * rho / (1.0 - rho)
            if est_gap <= eps:
                converged = True
                break
        prev_delta = delta
    return SdpResult(f_cur, dual_from_primal(state, factor, zcache),
                     sweeps, est_gap, converged, trace)
