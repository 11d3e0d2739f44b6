"""Consensus least-squares solver fed directly with a measurement signal.

``ExactSolver`` uses the nominal ``z``; ``UncompensatedSolver`` uses the noisy
measurement as-is and serves as the no-rejection baseline.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ValidationError
from ..numerics import LinearOdeSystem
from .base import PrimalDualCore, constant_signal, neighbor_disagreement


class _DirectSolver(PrimalDualCore):
    extra_dim = 0

    def __init__(self, problem, graph, kappa1=1.0, kappa2=1.0, signal=None):
        super().__init__(problem, graph, kappa1, kappa2)
        self.signal = signal if signal is not None else constant_signal(problem.z)
        self.events = []

    @property
    def state_dim(self):
        return 2 * self.nx

    def system(self, compensation_on=True):
        G = np.vstack([self.G_x, np.zeros((self.nx, self.N))])
        return LinearOdeSystem(self.core_matrix(), G, self.signal)

    def initial_state(self, rng):
        return rng.uniform(-1.0, 1.0, size=self.state_dim)

    def observe(self, t, y):
        return {
            "x": self.node_estimates(y),
            "v": self.node_duals(y),
            "omega_hat": np.zeros(0),
            "e": np.zeros(self.N),
            "compensation": np.zeros(self.N),
        }


class ExactSolver(_DirectSolver):
    name = "exact"

    def __init__(self, problem, graph, kappa1=1.0, kappa2=1.0, signal=None):
        # ``signal`` only used to inject unstructured noise around the nominal z
        super().__init__(problem, graph, kappa1, kappa2, signal=signal)


class UncompensatedSolver(_DirectSolver):
    name = "none"


def exact_rhs(x, v, problem, graph, kappa1, kappa2, z):
    """Per-node right-hand side; ``x`` and ``v`` have shape ``(N, m)``.

    ``x_i' = -k1 H_i^T (H_i x_i - z_i) - (k1 + k2) x_oi - v_oi`` and
    ``v_i' = k1 k2 x_oi`` with ``x_oi = sum_j a_ij (x_i - x_j)``.
    """
    H = problem.H
    A = graph.weights
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=float)
    x_o = neighbor_disagreement(A, x)
    v_o = neighbor_disagreement(A, v)
    residual = np.einsum("ij,ij->i", H, x) - z
    dx = -kappa1 * H * residual[:, None] - (kappa1 + kappa2) * x_o - v_o
    dv = kappa1 * kappa2 * x_o
    return dx, dv


def undirected_rhs(x, v, problem, graph, z):
    """Symmetric-graph form with unit gains; rejects asymmetric adjacency."""
    if not graph.is_symmetric():
        raise ValidationError("undirected solver requires a symmetric adjacency matrix")
    H = problem.H
    A = graph.weights
    x_o = neighbor_disagreement(A, np.asarray(x, dtype=float))
    v_o = neighbor_disagreement(A, np.asarray(v, dtype=float))
    residual = np.einsum("ij,ij->i", H, x) - np.asarray(z, dtype=float)
    return -H * residual[:, None] - x_o - v_o, x_o


def equilibrium(problem, graph, kappa1=1.0):
    """A stationary ``(x*, v*)`` of the exact dynamics (``v*`` up to ``1 (x) c``).

    Solves ``k1 Hc^T (Hc x* - z) + L v* = 0`` with ``x* = 1 (x) y*``.
    """
    from ..problem import least_squares_oracle

    core = PrimalDualCore(problem, graph, kappa1, 1.0)
    y_star = least_squares_oracle(problem)
    x_star = np.tile(y_star, core.N)
    target = -kappa1 * core.Hc.T @ (core.Hc @ x_star - problem.z)
    v_star, *_ = np.linalg.lstsq(core.Lm, target, rcond=None)
    return x_star.reshape(core.N, core.m), v_star.reshape(core.N, core.m)
