"""Hybrid zonotope data type and its algebraic operations.

A hybrid zonotope <Gc, Gb, c, Ac, Ab, b> represents the set

    { Gc @ xc + Gb @ xb + c :  xc in [-1,1]^ng,  xb in {-1,+1}^nb,
                               Ac @ xc + Ab @ xb = b }.

All values are immutable after construction; every operation is a pure
function of its inputs.  Queries that require optimization (membership,
emptiness, support, exact interval hulls, sampling) are answered by the
branch-and-bound engine in ``hzreach.lp``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptySetError, PrefixMismatchError
from .intervals import IntervalVector
from .lp import LpProblem, MilpProblem, SolveStatus, enumerate_binary_leaves, lp_solve, milp_solve

# Equality constraints are deemed satisfied within this infinity-norm slack in
# all feasibility decisions (emptiness, membership).
FEAS_TOL = 1e-7


@dataclass(frozen=True)
class ComplexityRecord:
    """Representation sizes (continuous generators, binary generators, constraints)."""

    n_g: int
    n_b: int
    n_c: int

    def astuple(self) -> tuple[int, int, int]:
        return (self.n_g, self.n_b, self.n_c)

    def __add__(self, other: "ComplexityRecord") -> "ComplexityRecord":
        return ComplexityRecord(self.n_g + other.n_g, self.n_b + other.n_b,
                                self.n_c + other.n_c)


@dataclass(frozen=True)
class FactorPoint:
    """A factor assignment witnessing membership: xc in [-1,1]^ng, xb in {-1,+1}^nb."""

    xi_c: np.ndarray
    xi_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi_c", np.asarray(self.xi_c, dtype=float).reshape(-1))
        object.__setattr__(self, "xi_b", np.asarray(self.xi_b, dtype=float).reshape(-1))


def _matrix(M, rows: int | None, cols: int | None, name: str) -> np.ndarray:
    if M is None:
        M = np.zeros((rows if rows is not None else 0, cols if cols is not None else 0))
    M = np.array(M, dtype=float)  # copy: the stored block is frozen below
    if M.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={M.ndim}")
    if rows is not None and M.shape[0] != rows:
        raise ValueError(f"{name} has {M.shape[0]} rows, expected {rows}")
    if cols is not None and M.shape[1] != cols:
        raise ValueError(f"{name} has {M.shape[1]} columns, expected {cols}")
    return M


class HybridZonotope:
    """Immutable hybrid zonotope in R^n.

    Args:
        Gc: continuous generator matrix, shape (n, n_g).  None means n_g = 0.
        Gb: binary generator matrix, shape (n, n_b).  None means n_b = 0.
        c: center vector, length n.
        Ac, Ab, b: equality constraints Ac @ xc + Ab @ xb = b, with n_c rows.
            None for all three means an unconstrained set.
    """

    __slots__ = ("Gc", "Gb", "c", "Ac", "Ab", "b", "_empty")

    def __init__(self, Gc=None, Gb=None, c=None, Ac=None, Ab=None, b=None):
        c = np.array(c, dtype=float).reshape(-1)
        if c.size == 0:
            raise ValueError("center must have at least one coordinate")
        n = c.size
        Gc = _matrix(Gc, n, None, "Gc")
        Gb = _matrix(Gb, n, None, "Gb")
        b = np.zeros(0) if b is None else np.array(b, dtype=float).reshape(-1)
        Ac = _matrix(Ac, b.size, Gc.shape[1], "Ac")
        Ab = _matrix(Ab, b.size, Gb.shape[1], "Ab")
        for name, arr in (("Gc", Gc), ("Gb", Gb), ("c", c), ("Ac", Ac), ("Ab", Ab), ("b", b)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "Gc", Gc)
        object.__setattr__(self, "Gb", Gb)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "Ac", Ac)
        object.__setattr__(self, "Ab", Ab)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "_empty", None)

    def __setattr__(self, name, value):
        raise AttributeError("HybridZonotope is immutable")

    # -- basic descriptors -------------------------------------------------

    @property
    def dim(self) -> int:
        return self.c.size

    @property
    def n_g(self) -> int:
        return self.Gc.shape[1]

    @property
    def n_b(self) -> int:
        return self.Gb.shape[1]

    @property
    def n_c(self) -> int:
        return self.b.size

    @property
    def complexity(self) -> ComplexityRecord:
        return ComplexityRecord(self.n_g, self.n_b, self.n_c)

    def __repr__(self):
        return (f"HybridZonotope(dim={self.dim}, n_g={self.n_g}, "
                f"n_b={self.n_b}, n_c={self.n_c})")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_box(cls, lower, upper) -> "HybridZonotope":
        """Axis-aligned box as a zonotope (zero-width coordinates allowed)."""
        lower = np.asarray(lower, dtype=float).reshape(-1)
        upper = np.asarray(upper, dtype=float).reshape(-1)
        if lower.size != upper.size or np.any(lower > upper):
            raise ValueError("invalid box bounds")
        return cls(Gc=np.diag(0.5 * (upper - lower)), c=0.5 * (upper + lower))

    @classmethod
    def from_point(cls, x) -> "HybridZonotope":
        x = np.asarray(x, dtype=float).reshape(-1)
        return cls(c=x)

    @classmethod
    def from_interval(cls, iv: IntervalVector) -> "HybridZonotope":
        return cls.from_box(iv.lower, iv.upper)

    # -- factor evaluation -------------------------------------------------

    def point_of(self, factor: FactorPoint) -> np.ndarray:
        """Map a factor assignment through the generators."""
        if factor.xi_c.size != self.n_g or factor.xi_b.size != self.n_b:
            raise ValueError("factor point has wrong arity")
        return self.Gc @ factor.xi_c + self.Gb @ factor.xi_b + self.c

    def constraint_residual(self, factor: FactorPoint) -> float:
        if self.n_c == 0:
            return 0.0
        r = self.Ac @ factor.xi_c + self.Ab @ factor.xi_b - self.b
        return float(np.max(np.abs(r)))

    # -- affine operations ---------------------------------------------

    def affine_map(self, R, t=None) -> "HybridZonotope":
        """The set {R @ x + t : x in self}; the constraint block is unchanged."""
        R = np.asarray(R, dtype=float)
        if R.ndim != 2 or R.shape[1] != self.dim:
            raise ValueError(f"map matrix must have {self.dim} columns")
        t = np.zeros(R.shape[0]) if t is None else np.asarray(t, dtype=float).reshape(-1)
        if t.size != R.shape[0]:
            raise ValueError("offset length must match the map's row count")
        return HybridZonotope(R @ self.Gc, R @ self.Gb, R @ self.c + t,
                              self.Ac, self.Ab, self.b)

    def project(self, dims) -> "HybridZonotope":
        """Coordinate projection onto the given dimension indices."""
        dims = list(dims)
        R = np.zeros((len(dims), self.dim))
        for row, d in enumerate(dims):
            R[row, d] = 1.0
        return self.affine_map(R)

    # -- set combinations --------------------------------------------------

    def generalized_intersect(self, other: "HybridZonotope", R=None) -> "HybridZonotope":
        """The set {x in self : R @ x in other}.

        The result follows the fixed block layout: the second operand's
        constraints are stacked on top, then this set's constraints, then the
        coupling rows; factors of the second operand come first.  This
        ordering is what keeps later constrained products well defined.
        """
        if R is None:
            R = np.eye(self.dim)
        R = np.asarray(R, dtype=float)
        if R.shape != (other.dim, self.dim):
            raise ValueError(f"map must have shape ({other.dim}, {self.dim})")
        z, y = self, other
        Gc = np.hstack([np.zeros((z.dim, y.n_g)), z.Gc])
        Gb = np.hstack([np.zeros((z.dim, y.n_b)), z.Gb])
        Ac = np.block([
            [y.Ac, np.zeros((y.n_c, z.n_g))],
            [np.zeros((z.n_c, y.n_g)), z.Ac],
            [-y.Gc, R @ z.Gc],
        ])
        Ab = np.block([
            [y.Ab, np.zeros((y.n_c, z.n_b))],
            [np.zeros((z.n_c, y.n_b)), z.Ab],
            [-y.Gb, R @ z.Gb],
        ])
        b = np.concatenate([y.b, z.b, y.c - R @ z.c])
        return HybridZonotope(Gc, Gb, z.c, Ac, Ab, b)

    def cartesian_product(self, other: "HybridZonotope") -> "HybridZonotope":
        """Block-diagonal stacking: {(z, y) : z in self, y in other}."""
        z, y = self, other
        Gc = np.block([
            [z.Gc, np.zeros((z.dim, y.n_g))],
            [np.zeros((y.dim, z.n_g)), y.Gc],
        ])
        Gb = np.block([
            [z.Gb, np.zeros((z.dim, y.n_b))],
            [np.zeros((y.dim, z.n_b)), y.Gb],
        ])
        Ac = np.block([
            [z.Ac, np.zeros((z.n_c, y.n_g))],
            [np.zeros((y.n_c, z.n_g)), y.Ac],
        ])
        Ab = np.block([
            [z.Ab, np.zeros((z.n_c, y.n_b))],
            [np.zeros((y.n_c, z.n_b)), y.Ab],
        ])
        return HybridZonotope(Gc, Gb, np.concatenate([z.c, y.c]),
                              Ac, Ab, np.concatenate([z.b, y.b]))

    def constrained_product(self, other: "HybridZonotope") -> "HybridZonotope":
        """Factor-sharing product of self with a set derived from it.

        Requires this set's constraints to be an exact leading prefix of the
        other's (matrix prefix equality, tolerance zero): the other set's
        first n_g/n_b factor columns are then identified with this set's
        factors, so paired coordinates are generated by the same factors.
        The result is a subset of the plain Cartesian product.

        Raises:
            PrefixMismatchError: if the partition condition fails.
        """
        z, y = self, other
        if y.n_g < z.n_g or y.n_b < z.n_b or y.n_c < z.n_c:
            raise PrefixMismatchError("second operand has fewer factors or constraints")
        ok = (np.array_equal(y.Ac[:z.n_c, :z.n_g], z.Ac)
              and not y.Ac[:z.n_c, z.n_g:].any()
              and np.array_equal(y.Ab[:z.n_c, :z.n_b], z.Ab)
              and not y.Ab[:z.n_c, z.n_b:].any()
              and np.array_equal(y.b[:z.n_c], z.b))
        if not ok:
            raise PrefixMismatchError("constraints of the first operand are not a "
                                      "leading prefix of the second operand's")
        Gc = np.vstack([
            np.hstack([z.Gc, np.zeros((z.dim, y.n_g - z.n_g))]),
            y.Gc,
        ])
        Gb = np.vstack([
            np.hstack([z.Gb, np.zeros((z.dim, y.n_b - z.n_b))]),
            y.Gb,
        ])
        return HybridZonotope(Gc, Gb, np.concatenate([z.c, y.c]), y.Ac, y.Ab, y.b)

    # -- optimization-backed queries -----------------------------------

    def _milp(self, objective: np.ndarray, extra_rows: np.ndarray | None = None,
              extra_rhs: np.ndarray | None = None, slack: float = 0.0) -> MilpProblem:
        """Assemble the factor-space MILP for this set.

        Variables are [xc, xb] plus, when ``slack`` > 0, one bounded residual
        variable per equality row so that rows only need to hold within the
        requested infinity-norm slack.
        """
        A = np.hstack([self.Ac, self.Ab]) if self.n_c else np.zeros((0, self.n_g + self.n_b))
        rhs = self.b
        if extra_rows is not None:
            A = np.vstack([A, extra_rows]) if A.size or extra_rows.size else extra_rows
            rhs = np.concatenate([rhs, extra_rhs])
        n_rows = rhs.size
        nv = self.n_g + self.n_b
        lb = -np.ones(nv)
        ub = np.ones(nv)
        c = np.asarray(objective, dtype=float)
        if slack > 0.0 and n_rows:
            A = np.hstack([A, np.eye(n_rows)])
            lb = np.concatenate([lb, -slack * np.ones(n_rows)])
            ub = np.concatenate([ub, slack * np.ones(n_rows)])
            c = np.concatenate([c, np.zeros(n_rows)])
        binaries = tuple(range(self.n_g, self.n_g + self.n_b))
        return MilpProblem(LpProblem(c, A, rhs, lb, ub), binaries)

    def is_empty(self) -> bool:
        """True iff no feasible factor assignment exists (within FEAS_TOL slack)."""
        if self._empty is None:
            if self.n_c == 0:
                result = False
            else:
                p = self._milp(np.zeros(self.n_g + self.n_b), slack=FEAS_TOL)
                result = not milp_solve(p, stop_at_first=True).is_optimal
            object.__setattr__(self, "_empty", result)
        return self._empty

    def contains_point(self, x, tol: float | None = None, witness: bool = False):
        """Membership of a point, decided as MILP feasibility.

        True iff factors exist satisfying both the constraints and
        Gc @ xc + Gb @ xb = x - c, each within infinity-norm ``tol``
        (default FEAS_TOL).  With ``witness=True`` returns
        (bool, FactorPoint | None).
        """
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise ValueError("point dimension mismatch")
        if tol is None:
            tol = FEAS_TOL
        if tol <= 0:
            raise ValueError("tol must be positive")
        rows = np.hstack([self.Gc, self.Gb])
        p = self._milp(np.zeros(self.n_g + self.n_b),
                       extra_rows=rows, extra_rhs=x - self.c, slack=tol)
        res = milp_solve(p, stop_at_first=True)
        if not witness:
            return res.is_optimal
        if not res.is_optimal:
            return False, None
        fp = FactorPoint(res.x[:self.n_g], res.x[self.n_g:self.n_g + self.n_b])
        return True, fp

    def support(self, d) -> float:
        """max over the set of d @ x, exact via branch-and-bound.

        Raises:
            EmptySetError: if the set is empty.
        """
        d = np.asarray(d, dtype=float).reshape(-1)
        if d.size != self.dim:
            raise ValueError("direction dimension mismatch")
        obj = -np.concatenate([d @ self.Gc, d @ self.Gb])
        res = milp_solve(self._milp(obj))
        if not res.is_optimal:
            raise EmptySetError("support of an empty set")
        return float(-res.objective + d @ self.c)

    def interval_hull(self, mode: str = "exact") -> IntervalVector:
        """Smallest axis-aligned box containing the set.

        ``exact`` solves one minimization and one maximization per coordinate;
        ``generator_relaxed`` ignores the constraints and returns
        c +/- (|Gc| @ 1 + |Gb| @ 1), a sound superset.
        """
        if mode == "generator_relaxed":
            rad = np.abs(self.Gc) @ np.ones(self.n_g) + np.abs(self.Gb) @ np.ones(self.n_b)
            return IntervalVector(self.c - rad, self.c + rad)
        if mode != "exact":
            raise ValueError(f"unknown hull mode: {mode!r}")
        lower = np.empty(self.dim)
        upper = np.empty(self.dim)
        for i in range(self.dim):
            row = np.concatenate([self.Gc[i], self.Gb[i]])
            lo = milp_solve(self._milp(row))
            if not lo.is_optimal:
                raise EmptySetError("interval hull of an empty set")
            hi = milp_solve(self._milp(-row))
            lower[i] = lo.objective + self.c[i]
            upper[i] = -hi.objective + self.c[i]
        return IntervalVector(np.minimum(lower, upper), np.maximum(lower, upper))

    def feasible_binary_assignments(self, limit: int = 100_000) -> list[np.ndarray]:
        """All {-1,+1} assignments of the binary factors admitting feasible xc."""
        p = self._milp(np.zeros(self.n_g + self.n_b), slack=FEAS_TOL)
        return enumerate_binary_leaves(p, limit=limit)

    def sample_points(self, k: int, seed: int) -> np.ndarray:
        """k member points, deterministic for a fixed seed, shape (k, dim).

        Feasible binary assignments are enumerated by branch-and-bound; for
        each draw, the continuous factors solve an LP with a random objective
        so samples land on vertices of the chosen fiber.

        Raises:
            EmptySetError: if the set is empty.
        """
        assignments = self.feasible_binary_assignments()
        if not assignments:
            raise EmptySetError("cannot sample an empty set")
        rng = np.random.default_rng(seed)
        out = np.empty((k, self.dim))
        A = np.hstack([self.Ac, self.Ab]) if self.n_c else None
        for j in range(k):
            xb = assignments[int(rng.integers(len(assignments)))]
            obj = rng.standard_normal(self.n_g)
            if self.n_g == 0:
                out[j] = self.Gb @ xb + self.c
                continue
            if A is None:
                xc = np.where(obj > 0, -1.0, 1.0)
            else:
                lb = np.concatenate([-np.ones(self.n_g), xb])
                ub = np.concatenate([np.ones(self.n_g), xb])
                res = lp_solve(LpProblem(np.concatenate([obj, np.zeros(self.n_b)]),
                                         A, self.b, lb, ub))
                if res.status is not SolveStatus.OPTIMAL:
                    raise EmptySetError("enumerated assignment lost feasibility")
                xc = res.x[:self.n_g]
            out[j] = self.Gc @ xc + self.Gb @ xb + self.c
        return out

    # -- serialization -------------------------------------------------

    def to_json_dict(self) -> dict:
        """JSON object with row-major nested arrays; empty blocks are omitted."""
        d: dict = {"c": self.c.tolist()}
        if self.n_g:
            d["Gc"] = self.Gc.tolist()
        if self.n_b:
            d["Gb"] = self.Gb.tolist()
        if self.n_c:
            d["Ac"] = self.Ac.tolist()
            d["Ab"] = self.Ab.tolist()
            d["b"] = self.b.tolist()
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "HybridZonotope":
        if "c" not in d:
            raise ValueError("hybrid zonotope JSON requires key 'c'")
        c = np.asarray(d["c"], dtype=float).reshape(-1)
        n = c.size
        b = np.asarray(d.get("b", []), dtype=float).reshape(-1)
        nc = b.size

        def block(key, rows, default_cols):
            if key in d:
                arr = np.asarray(d[key], dtype=float)
                return arr.reshape(rows, -1) if arr.size else arr.reshape(rows, 0)
            return np.zeros((rows, default_cols))

        Gc = block("Gc", n, 0)
        Gb = block("Gb", n, 0)
        Ac = block("Ac", nc, Gc.shape[1])
        Ab = block("Ab", nc, Gb.shape[1])
        return cls(Gc, Gb, c, Ac, Ab, b)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load(cls, path) -> "HybridZonotope":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))
