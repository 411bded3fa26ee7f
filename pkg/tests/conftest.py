"""Shared fixtures and independent oracles for the test suite."""

import itertools

import numpy as np
import pytest

from hzreach import (ClosedLoopRnn, HybridZonotope, LpProblem, RnnLayer,
                     SolveStatus, lp_solve)
from hzreach.systems import gate_system, half_system


def box(lo, hi) -> HybridZonotope:
    return HybridZonotope.from_box(lo, hi)


@pytest.fixture
def half():
    return half_system()


@pytest.fixture
def gate():
    return gate_system()


def flip_system() -> ClosedLoopRnn:
    """Scalar system x_{t+1} = max(0, 0.6 - 1.5 x_t).

    Oscillates between the two ReLU pieces, so the hidden pre-activation
    straddles zero at every step and the unstable count grows with the
    horizon; used where a ladder of binary limits is needed.
    """
    layer = RnnLayer(Wh=[[0.0]], Wx=[[-1.5]], vh=[0.6])
    return ClosedLoopRnn((layer,), Wy=[[1.0]], vy=[0.0])


def random_hz(rng, dim=2, n_g=3, n_b=2, n_c=2, scale=1.0) -> HybridZonotope:
    """Random nonempty hybrid zonotope, feasible by construction.

    The constraint right-hand side is generated from a random feasible factor
    assignment, so the set always contains at least one point.
    """
    Gc = scale * rng.normal(size=(dim, n_g))
    Gb = scale * rng.normal(size=(dim, n_b))
    c = scale * rng.normal(size=dim)
    xi_c = rng.uniform(-1, 1, size=n_g)
    xi_b = rng.choice([-1.0, 1.0], size=n_b)
    Ac = rng.normal(size=(n_c, n_g))
    Ab = rng.normal(size=(n_c, n_b))
    b = Ac @ xi_c + Ab @ xi_b
    return HybridZonotope(Gc, Gb, c, Ac, Ab, b)


def random_system(rng, n=None, L=None, max_width=4, gain=0.7):
    """Random contracting closed-loop RNN plus a nonnegative box domain."""
    n = int(rng.integers(1, 3)) if n is None else n
    L = int(rng.integers(1, 3)) if L is None else L
    widths = [int(rng.integers(1, max_width + 1)) for _ in range(L)]
    layers = []
    prev = n
    for w in widths:
        Wh = gain * rng.uniform(-1, 1, size=(w, w)) / max(w, 1)
        Wx = gain * rng.uniform(-1, 1, size=(w, prev)) / max(prev, 1)
        vh = rng.uniform(-0.3, 0.4, size=w)
        layers.append(RnnLayer(Wh, Wx, vh))
        prev = w
    Wy = gain * rng.uniform(-1, 1, size=(n, prev)) / max(prev, 1)
    vy = rng.uniform(-0.1, 0.3, size=n)
    model = ClosedLoopRnn(tuple(layers), Wy, vy)
    lo = rng.uniform(0.0, 0.3, size=n)
    domain = HybridZonotope.from_box(lo, lo + rng.uniform(0.3, 0.8, size=n))
    return model, domain


def grid_points(lo, hi, k):
    """Regular k^n grid over a box, as an (k^n, n) array."""
    lo = np.asarray(lo, dtype=float).reshape(-1)
    hi = np.asarray(hi, dtype=float).reshape(-1)
    axes = [np.linspace(lo[i], hi[i], k) for i in range(lo.size)]
    return np.array([p for p in itertools.product(*axes)])


def unit_directions(k, dim, seed=0):
    rng = np.random.default_rng(seed)
    D = rng.normal(size=(k, dim))
    return D / np.linalg.norm(D, axis=1, keepdims=True)


def milp_by_enumeration(p):
    """Exhaustive oracle: best LP value over all 2^nb binary assignments."""
    lp = p.lp
    binaries = p.binary_index
    best_status = SolveStatus.INFEASIBLE
    best_obj, best_x = None, None
    for assignment in itertools.product((-1.0, 1.0), repeat=len(binaries)):
        lb, ub = lp.lb.copy(), lp.ub.copy()
        for i, v in zip(binaries, assignment):
            lb[i] = ub[i] = v
        res = lp_solve(LpProblem(lp.c, lp.A, lp.b, lb, ub))
        if res.status is SolveStatus.OPTIMAL:
            best_status = SolveStatus.OPTIMAL
            if best_obj is None or res.objective < best_obj:
                best_obj, best_x = res.objective, res.x
    return best_status, best_obj, best_x


def membership_predicate(Z, Y, R, x, tol=1e-7):
    """Direct two-call oracle for the generalized-intersection identity."""
    return Z.contains_point(x, tol) and Y.contains_point(R @ np.asarray(x), tol)


def polygon_area(vertices) -> float:
    """Shoelace area of an ordered polygon."""
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def point_in_convex_polygon(p, vertices, tol=1e-7) -> bool:
    v = np.asarray(vertices, dtype=float)
    if len(v) < 3:
        return bool(len(v) and np.min(np.linalg.norm(v - p, axis=1)) <= tol)
    sign = 0
    for i in range(len(v)):
        a, bb = v[i], v[(i + 1) % len(v)]
        cross = (bb[0] - a[0]) * (p[1] - a[1]) - (bb[1] - a[1]) * (p[0] - a[0])
        if abs(cross) <= tol:
            continue
        s = 1 if cross > 0 else -1
        if sign == 0:
            sign = s
        elif s != sign:
            return False
    return True
