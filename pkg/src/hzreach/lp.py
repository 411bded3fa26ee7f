"""Bounded-variable LP solving and branch-and-bound over {-1,+1} binaries.

This is the engine behind emptiness, membership, support and exact interval
hull queries on hybrid zonotopes.  Linear programs are equality-constrained
with finite box bounds on every variable; binaries are variables restricted
to the two values -1 and +1.  The LP relaxation is delegated to HiGHS via
scipy, which returns vertex-optimal basic solutions deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog

# Tolerances used by the branch-and-bound search (see module design notes):
# a binary is considered integral when within INTEGRALITY_TOL of +/-1, and
# bound comparisons during pruning use PRUNE_TOL slack.
INTEGRALITY_TOL = 1e-6
PRUNE_TOL = 1e-9

_HIGHS_OPTIONS = {
    "presolve": True,
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    x: np.ndarray | None = None
    objective: float | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


@dataclass(frozen=True)
class LpProblem:
    """minimize c @ x  subject to  A @ x = b,  lb <= x <= ub."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2:
            A = A.reshape(-1, c.size)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        lb = np.asarray(self.lb, dtype=float).reshape(-1)
        ub = np.asarray(self.ub, dtype=float).reshape(-1)
        if A.shape != (b.size, c.size):
            raise ValueError(f"A has shape {A.shape}, expected ({b.size}, {c.size})")
        if lb.size != c.size or ub.size != c.size:
            raise ValueError("bound vectors must match the number of variables")
        if np.any(lb > ub):
            raise ValueError("lower bounds exceed upper bounds")
        if not (np.all(np.isfinite(lb)) and np.all(np.isfinite(ub))):
            raise ValueError("all variable bounds must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)

    @property
    def num_vars(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class MilpProblem:
    """An LpProblem plus the indices of variables restricted to {-1, +1}."""

    lp: LpProblem
    binary_index: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.binary_index)
        if len(set(idx)) != len(idx):
            raise ValueError("binary_index contains duplicates")
        for i in idx:
            if not 0 <= i < self.lp.num_vars:
                raise ValueError(f"binary index {i} out of range")
        object.__setattr__(self, "binary_index", idx)


def _solve_bounds(p: LpProblem, lb: np.ndarray, ub: np.ndarray) -> SolveResult:
    """Solve p's LP with overridden bounds (used by branch-and-bound nodes)."""
    n = p.num_vars
    if n == 0:
        if p.b.size and np.max(np.abs(p.b)) > 1e-12:
            return SolveResult(SolveStatus.INFEASIBLE)
        return SolveResult(SolveStatus.OPTIMAL, np.zeros(0), 0.0)
    A_eq = p.A if p.b.size else None
    b_eq = p.b if p.b.size else None
    res = linprog(p.c, A_eq=A_eq, b_eq=b_eq, bounds=np.column_stack([lb, ub]),
                  method="highs", options=_HIGHS_OPTIONS)
    if res.status == 0:
        x = np.clip(res.x, lb, ub)
        return SolveResult(SolveStatus.OPTIMAL, x, float(p.c @ x))
    if res.status == 2:
        return SolveResult(SolveStatus.INFEASIBLE)
    if res.status == 3:
        # Cannot happen with finite bounds on every variable.
        raise RuntimeError("LP reported unbounded despite finite variable bounds")
    raise RuntimeError(f"LP solver failure (HiGHS status {res.status}): {res.message}")


def lp_solve(p: LpProblem) -> SolveResult:
    """Solve a bounded-variable equality-constrained LP.

    Returns a vertex-optimal solution when feasible.  Deterministic: the same
    problem data always yields the same result.
    """
    return _solve_bounds(p, p.lb, p.ub)


def _fractional_binary(x: np.ndarray, binaries: tuple[int, ...], lb: np.ndarray,
                       ub: np.ndarray) -> int | None:
    """Lowest-index binary not yet integral within INTEGRALITY_TOL."""
    for i in binaries:
        if lb[i] == ub[i]:
            continue
        if min(abs(x[i] - 1.0), abs(x[i] + 1.0)) > INTEGRALITY_TOL:
            return i
    return None


def _lowest_free_binary(binaries: tuple[int, ...], lb, ub) -> int | None:
    for i in binaries:
        if lb[i] != ub[i]:
            return i
    return None


def _round_binaries(p: MilpProblem, x: np.ndarray, lb: np.ndarray,
                    ub: np.ndarray) -> SolveResult:
    """Re-solve with every binary pinned to its rounded value for a clean vertex."""
    lb2, ub2 = lb.copy(), ub.copy()
    for i in p.binary_index:
        v = 1.0 if x[i] >= 0.0 else -1.0
        lb2[i] = ub2[i] = v
    return _solve_bounds(p.lp, lb2, ub2)


def milp_solve(p: MilpProblem, stop_at_first: bool = False) -> SolveResult:
    """Exact minimization over {-1,+1} binaries by depth-first branch-and-bound.

    Branches the lowest-index fractional binary, exploring the -1 branch
    first; nodes are pruned on LP infeasibility or on bound against the
    incumbent.  With ``stop_at_first`` the search stops at the first integral
    feasible solution, which is the mode used by feasibility queries.

    Returns:
        SolveResult whose solution (if any) has every binary entry exactly
        at -1 or +1 and satisfies the constraints to LP tolerance.
    """
    binaries = p.binary_index
    best: SolveResult | None = None
    stack: list[tuple[np.ndarray, np.ndarray]] = [(p.lp.lb.copy(), p.lp.ub.copy())]
    while stack:
        lb, ub = stack.pop()
        rel = _solve_bounds(p.lp, lb, ub)
        if not rel.is_optimal:
            continue
        if best is not None and rel.objective >= best.objective - PRUNE_TOL:
            continue
        frac = _fractional_binary(rel.x, binaries, lb, ub)
        if frac is None:
            cand = _round_binaries(p, rel.x, lb, ub)
            if cand.is_optimal:
                if best is None or cand.objective < best.objective - PRUNE_TOL:
                    best = cand
                    if stop_at_first:
                        return best
                continue
            # Rounding landed infeasible (boundary case): branch a free binary.
            frac = _lowest_free_binary(binaries, lb, ub)
            if frac is None:
                continue
        for v in (1.0, -1.0):  # pushed so that the -1 branch is explored first
            lb2, ub2 = lb.copy(), ub.copy()
            lb2[frac] = ub2[frac] = v
            stack.append((lb2, ub2))
    if best is None:
        return SolveResult(SolveStatus.INFEASIBLE)
    return best


def enumerate_binary_leaves(p: MilpProblem, limit: int = 100_000) -> list[np.ndarray]:
    """All complete {-1,+1} assignments whose fixed-binary LP is feasible.

    Depth-first in index order with the -1 branch first, pruning subtrees
    whose LP relaxation is already infeasible; the returned order is
    deterministic.  The objective of ``p`` is ignored.
    """
    binaries = p.binary_index
    leaves: list[np.ndarray] = []
    stack: list[tuple[np.ndarray, np.ndarray]] = [(p.lp.lb.copy(), p.lp.ub.copy())]
    feas = LpProblem(np.zeros(p.lp.num_vars), p.lp.A, p.lp.b, p.lp.lb, p.lp.ub)
    while stack:
        lb, ub = stack.pop()
        if not _solve_bounds(feas, lb, ub).is_optimal:
            continue
        i = _lowest_free_binary(binaries, lb, ub)
        if i is None:
            leaves.append(np.array([lb[j] for j in binaries]))
            if len(leaves) > limit:
                raise RuntimeError(f"more than {limit} feasible binary assignments")
            continue
        for v in (1.0, -1.0):
            lb2, ub2 = lb.copy(), ub.copy()
            lb2[i] = ub2[i] = v
            stack.append((lb2, ub2))
    return leaves
