"""Solver configuration knobs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional


@dataclass
class SolverConfig:
    """Everything the search driver needs beyond the instance itself.

    eps is the target precision (in unsat units) of each relaxation solve;
    pruning rounds bounds up with ceil_tol guarding float noise at integer
    boundaries.  rank defaults to just above the square-root threshold for
    the number of columns.  depth_limit=1 degenerates to single-variable
    splits.
    """

    eps: float = 1e-2
    rank: Optional[int] = None
    seed: int = 0
    max_sweeps: int = 400
    depth_limit: int = 8
    rounding_c: float = 4.0
    time_limit: Optional[float] = None
    ceil_tol: float = 1e-6
    # test/audit hooks: called with (path, dual_bound) for every decided child
    # and with (path, mu_dict) for every warm-started certificate
    bound_recorder: Optional[Callable] = None
    transition_recorder: Optional[Callable] = None
