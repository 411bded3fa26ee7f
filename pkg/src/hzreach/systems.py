"""Reference closed-loop systems used by the test suite, docs and demos."""

from __future__ import annotations

import numpy as np

from .model import ClosedLoopRnn, RnnLayer


def half_system() -> ClosedLoopRnn:
    """Scalar system x_{t+1} = x_t / 2 on nonnegative states.

    One hidden layer passing the state through, output weight 0.5; every
    pre-activation is nonnegative on [0, 1], so all ReLUs are stable and
    trajectories are exactly (x, x/2, x/4, ...).
    """
    layer = RnnLayer(Wh=[[0.0]], Wx=[[1.0]], vh=[0.0])
    return ClosedLoopRnn((layer,), Wy=[[0.5]], vy=[0.0])


def gate_system() -> ClosedLoopRnn:
    """Scalar system x_{t+1} = max(0, 0.5 - x_t).

    On the domain [0, 1] the single hidden pre-activation spans [-0.5, 0.5],
    so the layer has exactly one unstable ReLU; handy for exercising the
    triangle relaxation and Unknown verdicts.
    """
    layer = RnnLayer(Wh=[[0.0]], Wx=[[-1.0]], vh=[0.5])
    return ClosedLoopRnn((layer,), Wy=[[1.0]], vy=[0.0])


def demo_system(seed: int = 0) -> ClosedLoopRnn:
    """Two-layer stacked RNN with {4, 8} hidden units on a planar state.

    A synthetic stand-in for a plant RNN stacked with a controller RNN.  The
    feedthrough path is built around orthonormal layer maps whose composition
    realizes a damped rotation with an interior fixed point, biases lift most
    units into their active region, and small recurrent weights couple the
    steps; on the demo box this yields a contracting loop with a handful of
    unstable ReLU units per step.
    """
    rng = np.random.default_rng(seed)

    def orthonormal(rows, cols):
        Q, _ = np.linalg.qr(rng.standard_normal((rows, rows)))
        return Q[:, :cols]

    n, w1, w2 = 2, 4, 8
    W1 = orthonormal(w1, n)
    W2 = orthonormal(w2, w1)
    v1 = 0.55 + 0.05 * rng.standard_normal(w1)
    v2 = 0.75 + 0.05 * rng.standard_normal(w2)
    Wh1 = 0.15 * rng.standard_normal((w1, w1)) / 2.0
    Wh2 = 0.15 * rng.standard_normal((w2, w2)) / 2.8
    rho, theta = 0.8, 0.6
    rot = rho * np.array([[np.cos(theta), -np.sin(theta)],
                          [np.sin(theta), np.cos(theta)]])
    Wy = rot @ np.linalg.pinv(W2 @ W1)
    fixed_point = np.array([0.45, 0.4])
    vy = fixed_point - rot @ fixed_point - Wy @ (W2 @ v1 + v2)
    return ClosedLoopRnn((RnnLayer(Wh1, W1, v1), RnnLayer(Wh2, W2, v2)),
                         Wy=Wy, vy=vy)


def demo_initial_box():
    """Initial-set bounds used by the demo workflow and its figures."""
    return ([0.35, 0.3], [0.55, 0.5])
