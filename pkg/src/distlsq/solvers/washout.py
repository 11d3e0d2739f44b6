"""Washout-filter baseline.

Each node splits its noisy measurement with ``s/(s+d)``.  The solver is fed
the complementary low-pass part ``d x_f`` (``x_f' = -d x_f + z_meas``), which
keeps the constant nominal value (DC gain 1) and attenuates a sinusoid at
``w`` by ``d / |jw + d|`` without removing it.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ValidationError
from ..numerics import LinearOdeSystem
from .base import PrimalDualCore, constant_signal, neighbor_disagreement


def washout_attenuation(omega, d):
    """Magnitude of the low-pass path ``d/(s+d)`` at ``s = j omega``."""
    return d / np.hypot(omega, d)


class WashoutSolver(PrimalDualCore):
    name = "washout"

    def __init__(self, problem, graph, pole=0.4, kappa1=1.0, kappa2=1.0, signal=None):
        super().__init__(problem, graph, kappa1, kappa2)
        if not pole > 0:
            raise ValidationError(f"washout pole must be positive, got {pole}")
        self.pole = float(pole)
        self.signal = signal if signal is not None else constant_signal(problem.z)
        self.events = []

    @property
    def state_dim(self):
        return 2 * self.nx + self.N

    def system(self, compensation_on=True):
        nx, N, d = self.nx, self.N, self.pole
        A = np.zeros((self.state_dim, self.state_dim))
        A[:nx, :nx] = self.A_xx
        A[:nx, nx : 2 * nx] = self.A_xv
        A[nx : 2 * nx, :nx] = self.A_vx
        A[2 * nx :, 2 * nx :] = -d * np.eye(N)
        if compensation_on:
            A[:nx, 2 * nx :] = d * self.G_x
            G = np.vstack([np.zeros((nx, N)), np.zeros((nx, N)), np.eye(N)])
        else:
            G = np.vstack([self.G_x, np.zeros((nx, N)), np.eye(N)])
        return LinearOdeSystem(A, G, self.signal)

    def initial_state(self, rng):
        return rng.uniform(-1.0, 1.0, size=self.state_dim)

    def observe(self, t, y):
        low = self.pole * y[2 * self.nx :]
        z_meas = np.asarray(self.signal(t), dtype=float).reshape(-1)
        return {
            "x": self.node_estimates(y),
            "v": self.node_duals(y),
            "omega_hat": np.zeros(0),
            "e": np.zeros(self.N),
            "compensation": z_meas - low,
        }


def washout_rhs(x, v, xf, problem, graph, kappa1, kappa2, z_meas, d):
    """Per-node right-hand side; ``xf`` holds the ``N`` low-pass states."""
    if not d > 0:
        raise ValidationError(f"washout pole must be positive, got {d}")
    H, A = problem.H, graph.weights
    y_in = d * np.asarray(xf, dtype=float)
    x_o = neighbor_disagreement(A, x)
    v_o = neighbor_disagreement(A, v)
    residual = np.einsum("ij,ij->i", H, x) - y_in
    dx = -kappa1 * H * residual[:, None] - (kappa1 + kappa2) * x_o - v_o
    dv = kappa1 * kappa2 * x_o
    dxf = -d * np.asarray(xf, dtype=float) + np.asarray(z_meas, dtype=float)
    return dx, dv, dxf
