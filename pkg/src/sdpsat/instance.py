"""CNF instances and the mutable assignment machinery shared by all search nodes.

Literals are signed DIMACS integers: +v for the variable, -v for its negation.
An Instance is immutable after construction; NodeState/WatchedStack are the
single-owner mutable view a search worker drives via assign()/unassign_to().

Clause bookkeeping follows the coefficient-move picture: every clause carries
an integer truth coefficient s0 that starts at -1 and absorbs +sign/-sign each
time one of its literals is assigned true/false.  A clause is falsified exactly
when s0 reaches -1 - n_j (all n_j literals assigned, none true).
"""

from __future__ import annotations

from dataclasses import dataclass, field

# assignment values
TRUE = 1
FALSE = -1
FREE = 0

# clause statuses
ACTIVE = 0
SATISFIED = 1
FALSIFIED = 2


class ParseError(ValueError):
    """Malformed DIMACS input or out-of-contract clause data."""


@dataclass(frozen=True, slots=True)
class Clause:
    """One clause: deduplicated signed literals, fixed original length."""

    lits: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.lits)


class Instance:
    """Immutable parsed formula: clauses plus the per-variable occurrence lists.

    occurrences[v] holds (clause_index, sign) for every clause containing
    variable v; it is the exact transpose of the clause-literal relation.
    Tautological clauses are dropped at construction (always satisfied) and
    empty clauses are counted separately (always falsified).
    """

    __slots__ = ("num_vars", "clauses", "occurrences", "lengths",
                 "tautology_count", "empty_count")

    def __init__(self, num_vars: int, clauses: list[Clause],
                 tautology_count: int = 0, empty_count: int = 0):
        self.num_vars = num_vars
        self.clauses = clauses
        self.lengths = tuple(c.length for c in clauses)
        self.tautology_count = tautology_count
        self.empty_count = empty_count
        occ: list[list[tuple[int, int]]] = [[] for _ in range(num_vars + 1)]
        for j, cl in enumerate(clauses):
            for lit in cl.lits:
                occ[abs(lit)].append((j, 1 if lit > 0 else -1))
        self.occurrences = occ

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def nnz(self) -> int:
        return sum(self.lengths)

    def __repr__(self) -> str:
        return (f"Instance(n={self.num_vars}, m={self.num_clauses}, "
                f"nnz={self.nnz})")


def instance_from_clauses(num_vars: int, clause_lists) -> Instance:
    """Build an Instance from raw literal lists, normalizing as parsed input.

    Duplicate literals inside a clause are removed, tautologies (v and -v in
    one clause) are dropped with a count, empty clauses are tallied into
    empty_count.  Raises ParseError on out-of-range literals.
    """
    clauses: list[Clause] = []
    tautologies = 0
    empties = 0
    for raw in clause_lists:
        seen: dict[int, None] = {}
        tautology = False
        for lit in raw:
            v = abs(lit)
            if lit == 0 or v > num_vars:
                raise ParseError(f"literal {lit} out of range (n={num_vars})")
            if -lit in seen:
                tautology = True
            seen.setdefault(lit, None)
        if tautology:
            tautologies += 1
            continue
        lits = tuple(seen)
        if not lits:
            empties += 1
            continue
        clauses.append(Clause(lits))
    return Instance(num_vars, clauses, tautologies, empties)


def parse_dimacs(text: str) -> Instance:
    """Parse DIMACS CNF or uniform-weight WCNF text into an Instance.

    Comment lines start with 'c'; a '%' line terminates the file (SATLIB
    convention).  WCNF clauses must all carry the same weight -- weighted
    MAXSAT is rejected explicitly rather than silently mis-solved.
    """
    num_vars = None
    is_wcnf = False
    clause_lists: list[list[int]] = []
    weight_seen: int | None = None
    current: list[int] = []
    expecting_weight = False

    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break
        if stripped.startswith("p"):
            if num_vars is not None:
                raise ParseError("duplicate problem line")
            tokens = stripped.split()
            if len(tokens) < 4 or tokens[1] not in ("cnf", "wcnf"):
                raise ParseError(f"malformed header: {stripped!r}")
            try:
                num_vars = int(tokens[2])
                int(tokens[3])
            except ValueError as exc:
                raise ParseError(f"malformed header: {stripped!r}") from exc
            if num_vars < 0:
                raise ParseError("negative variable count")
            is_wcnf = tokens[1] == "wcnf"
            expecting_weight = is_wcnf
            continue
        if num_vars is None:
            raise ParseError(f"clause data before problem line: {stripped!r}")
        for token in stripped.split():
            if expecting_weight:
                try:
                    w = int(token)
                except ValueError as exc:
                    raise ParseError(f"bad weight token {token!r}") from exc
                if w <= 0:
                    raise ParseError(f"non-positive clause weight {w}")
                if weight_seen is None:
                    weight_seen = w
                elif w != weight_seen:
                    raise ParseError(
                        "non-uniform soft weights: weighted MAXSAT unsupported")
                expecting_weight = False
                continue
            try:
                lit = int(token)
            except ValueError as exc:
                raise ParseError(f"bad literal token {token!r}") from exc
            if lit == 0:
                clause_lists.append(current)
                current = []
                expecting_weight = is_wcnf
            else:
                current.append(lit)
    if num_vars is None:
        raise ParseError("missing problem line")
    if current:
        raise ParseError("last clause not zero-terminated")
    return instance_from_clauses(num_vars, clause_lists)


class NodeState:
    """Mutable per-node view: assignment trail plus per-clause accumulators.

    Invariant: s0[j] = -1 + sum over assigned literals of sign*value, and
    base_unsat counts FALSIFIED clauses plus the instance's empty clauses.
    """

    __slots__ = ("instance", "assignment", "trail", "s0", "clause_status",
                 "base_unsat", "free_count")

    def __init__(self, instance: Instance):
        n = instance.num_vars
        self.instance = instance
        self.assignment = [FREE] * (n + 1)
        self.assignment[0] = TRUE  # truth slot, never reassigned
        self.trail: list[int] = []
        self.s0 = [-1] * instance.num_clauses
        self.clause_status = [ACTIVE] * instance.num_clauses
        self.base_unsat = instance.empty_count
        self.free_count = n

    def mark(self) -> int:
        """Trail length snapshot for a later unassign_to."""
        return len(self.trail)

    def active_clauses(self):
        status = self.clause_status
        return [j for j in range(len(status)) if status[j] == ACTIVE]

    def free_vars(self) -> list[int]:
        a = self.assignment
        return [v for v in range(1, self.instance.num_vars + 1) if a[v] == FREE]


class WatchedStack:
    """Per-assignment undo records plus the instrumentation counter.

    assign() walks the assigned variable's occurrence list once; clauses that
    are already satisfied or falsified cost a single status read (the O(1)
    skip), so a full assignment of every variable touches exactly nnz
    occurrence entries.
    """

    __slots__ = ("instance", "undo", "touch_count")

    def __init__(self, instance: Instance):
        self.instance = instance
        self.undo: list[list[tuple[int, int, int]]] = []
        self.touch_count = 0


def assign(state: NodeState, ws: WatchedStack, var: int, value: int):
    """Assign a free variable and update every incident non-satisfied clause.

    Returns the list of (clause_index, sign, new_status) moves so callers can
    maintain derived caches; new_status == ACTIVE means only s0 moved.
    """
    if state.assignment[var] != FREE:
        raise ValueError(f"variable {var} is not free")
    if value not in (TRUE, FALSE):
        raise ValueError(f"bad assignment value {value}")
    inst = state.instance
    s0 = state.s0
    status = state.clause_status
    lengths = inst.lengths
    moved: list[tuple[int, int, int]] = []
    touches = 0
    for j, sign in inst.occurrences[var]:
        touches += 1
        if status[j] != ACTIVE:
            continue
        s0[j] += value * sign
        if value * sign > 0:
            status[j] = SATISFIED
            moved.append((j, sign, SATISFIED))
        elif s0[j] == -1 - lengths[j]:
            status[j] = FALSIFIED
            state.base_unsat += 1
            moved.append((j, sign, FALSIFIED))
        else:
            moved.append((j, sign, ACTIVE))
    ws.touch_count += touches
    state.assignment[var] = value
    state.trail.append(var)
    state.free_count -= 1
    ws.undo.append(moved)
    return moved


def unassign_to(state: NodeState, ws: WatchedStack, trail_mark: int) -> None:
    """Roll the trail back to a recorded mark; exact involution of assign()."""
    if trail_mark > len(state.trail) or trail_mark < 0:
        raise ValueError(f"bad trail mark {trail_mark}")
    s0 = state.s0
    status = state.clause_status
    while len(state.trail) > trail_mark:
        var = state.trail.pop()
        value = state.assignment[var]
        moved = ws.undo.pop()
        ws.touch_count += len(moved)
        for j, sign, new_status in reversed(moved):
            s0[j] -= value * sign
            if new_status != ACTIVE:
                status[j] = ACTIVE
                if new_status == FALSIFIED:
                    state.base_unsat -= 1
        state.assignment[var] = FREE
        state.free_count += 1


def evaluate(instance: Instance, values, *, count_touches: bool = False):
    """Count clauses with every literal false under a full +/-1 assignment.

    values is indexed by variable (slot 0 unused).  Runs one pass over the
    clause-literal relation; with count_touches the literal-visit total is
    returned alongside for the O(nnz) bound checks.
    """
    unsat = instance.empty_count
    touches = 0
    for cl in instance.clauses:
        satisfied = False
        for lit in cl.lits:
            touches += 1
            if lit > 0:
                if values[lit] > 0:
                    satisfied = True
            elif values[-lit] < 0:
                satisfied = True
        if not satisfied:
            unsat += 1
    if count_touches:
        return unsat, touches
    return unsat
