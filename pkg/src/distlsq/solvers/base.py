"""Shared primal-dual core and the stacked-state layout.

Stacked state (N nodes, dimension m)::

    [ x_1 .. x_N | v_1 .. v_N | <variant-specific blocks> ]
      N*m          N*m

Variant blocks follow in the order given by ``Model.blocks``: observer/filter
states (sum of 2k_i+1), coefficient estimates (sum of k_i), washout states (N).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ..exceptions import DimensionError, ValidationError
from ..graph import laplacian


def stacked_rows(H):
    """``blkdiag(H_1, ..., H_N)`` as an ``N x N*m`` matrix."""
    return scipy.linalg.block_diag(*[H[i : i + 1] for i in range(H.shape[0])])


def neighbor_disagreement(A, X):
    """Rows ``sum_j a_ij (X_i - X_j)`` for ``X`` of shape ``(N, m)``."""
    return A.sum(axis=1)[:, None] * X - A @ X


class PrimalDualCore:
    """Block matrices of the consensus least-squares dynamics.

    ``x' = -k1 H^T (H x - y) - (k1 + k2) L x - L v`` and ``v' = k1 k2 L x``,
    with ``L`` the Laplacian lifted to ``N*m`` and ``y`` the per-node
    measurement actually fed to the solver.
    """

    def __init__(self, problem, graph, kappa1=1.0, kappa2=1.0):
        if not (kappa1 > 0 and kappa2 > 0):
            raise ValidationError(f"gains must be positive, got kappa1={kappa1}, kappa2={kappa2}")
        self.problem = problem
        self.graph = graph
        self.kappa1 = float(kappa1)
        self.kappa2 = float(kappa2)
        self.N = problem.node_count
        self.m = problem.dimension
        if graph.node_count != self.N:
            raise DimensionError(f"graph has {graph.node_count} nodes, problem has {self.N} rows")
        self.Lm = np.kron(laplacian(graph), np.eye(self.m))
        self.Hc = stacked_rows(problem.H)
        k1, k2 = self.kappa1, self.kappa2
        self.A_xx = -k1 * self.Hc.T @ self.Hc - (k1 + k2) * self.Lm
        self.A_xv = -self.Lm
        self.A_vx = k1 * k2 * self.Lm
        self.G_x = k1 * self.Hc.T
        self.nx = self.N * self.m

    def core_matrix(self):
        """``2Nm x 2Nm`` matrix of the ``(x, v)`` dynamics with zero input."""
        Z = np.zeros((self.nx, self.nx))
        return np.block([[self.A_xx, self.A_xv], [self.A_vx, Z]])

    def rhs(self, x, v, y_in):
        dx = self.A_xx @ x + self.A_xv @ v + self.G_x @ y_in
        return dx, self.A_vx @ x

    def split(self, y):
        return y[: self.nx], y[self.nx : 2 * self.nx]

    def node_estimates(self, y):
        return y[: self.nx].reshape(self.N, self.m)

    def node_duals(self, y):
        return y[self.nx : 2 * self.nx].reshape(self.N, self.m)


def constant_signal(z):
    z = np.asarray(z, dtype=float)

    def signal(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(z, t.shape + z.shape).copy()

    return signal


def add_signals(*signals):
    signals = [s for s in signals if s is not None]

    def signal(t):
        out = signals[0](t)
        for s in signals[1:]:
            out = out + s(t)
        return out

    return signal


def random_initial_state(dim, rng, low=-1.0, high=1.0):
    return rng.uniform(low, high, size=dim)
