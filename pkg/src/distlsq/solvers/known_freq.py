"""Disturbance rejection with known frequencies.

Each node runs ``eta' = S_obs eta + B z_meas`` and subtracts
``D0 T^{-1} eta`` from its measurement, where ``T S - S_obs T = B D``.  With
the Luenberger choice ``S_obs = S - K D``, ``B = K`` the solution is ``T = I``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.signal

from ..disturbance import output_row, sinusoid_selector, skew_block_matrix
from ..exceptions import NotHurwitzError, ValidationError
from ..identifier import is_hurwitz
from ..numerics import LinearOdeSystem, solve_sylvester
from .base import PrimalDualCore, constant_signal, neighbor_disagreement

REFERENCE_GAINS = (
    (24.0, -18.0, 21.5),
    (6.0, 0.0, 10.0),
    (2.67, 3.33, 5.83),
    (1.5, 4.5, 3.5),
)


def default_observer_poles(n):
    return -1.0 - np.arange(n, dtype=float)


def luenberger_gain(S, D, poles=None):
    """Column gain ``K`` placing the eigenvalues of ``S - K D``."""
    n = S.shape[0]
    poles = default_observer_poles(n) if poles is None else np.asarray(poles, dtype=float)
    return scipy.signal.place_poles(S.T, D.T, poles).gain_matrix.T


class NodeObserver:
    """Observer data for one node: ``S_obs``, ``B``, ``T`` and the compensation row."""

    def __init__(self, S, D, S_obs, B, field=None):
        if not is_hurwitz(S_obs):
            raise NotHurwitzError(
                "observer matrix is not Hurwitz", eigenvalues=np.linalg.eigvals(S_obs), field=field
            )
        sol = solve_sylvester(S, S_obs, B, D)
        if not sol.valid:
            raise ValidationError(f"Sylvester solve failed: {sol.reason}", field)
        self.S, self.D, self.S_obs, self.B, self.T = S, D, S_obs, B, sol.T
        k = (S.shape[0] - 1) // 2
        self.compensation_row = sinusoid_selector(k) @ np.linalg.inv(sol.T)

    @classmethod
    def luenberger(cls, freqs, K=None, poles=None, field=None):
        S = skew_block_matrix(freqs)
        D = output_row(len(freqs))
        K = luenberger_gain(S, D, poles) if K is None else np.asarray(K, dtype=float).reshape(-1, 1)
        if K.shape[0] != S.shape[0]:
            raise ValidationError(f"observer gain needs {S.shape[0]} entries, got {K.shape[0]}", field)
        return cls(S, D, S - K @ D, K, field=field)

    @classmethod
    def from_filter(cls, freqs, filt):
        return cls(skew_block_matrix(freqs), output_row(len(freqs)), filt.S, filt.B)


class KnownFrequencySolver(PrimalDualCore):
    name = "known_freq"

    def __init__(self, problem, graph, observers, kappa1=1.0, kappa2=1.0, signal=None):
        super().__init__(problem, graph, kappa1, kappa2)
        if len(observers) != self.N:
            raise ValidationError(f"need one observer per node ({self.N}), got {len(observers)}")
        self.observers = list(observers)
        self.signal = signal if signal is not None else constant_signal(problem.z)
        self.events = []
        dims = [ob.S_obs.shape[0] for ob in self.observers]
        self.n_obs = int(sum(dims))
        self.S_blk = scipy.linalg.block_diag(*[ob.S_obs for ob in self.observers])
        self.B_blk = scipy.linalg.block_diag(*[ob.B for ob in self.observers])
        self.C_blk = scipy.linalg.block_diag(*[ob.compensation_row for ob in self.observers])
        self.frequencies = np.concatenate([np.diag(ob.S, 1)[1::2] for ob in self.observers])

    @classmethod
    def luenberger(cls, problem, graph, spec, gains=None, poles=None, **kw):
        observers = []
        for i in range(spec.node_count):
            K = None if gains is None else gains[i]
            observers.append(
                NodeObserver.luenberger(spec.frequencies(i), K=K, poles=poles, field=f"observer_gains[{i}]")
            )
        return cls(problem, graph, observers, **kw)

    @property
    def state_dim(self):
        return 2 * self.nx + self.n_obs

    def system(self, compensation_on=True):
        nx = self.nx
        A = np.zeros((self.state_dim, self.state_dim))
        A[:nx, :nx] = self.A_xx
        A[:nx, nx : 2 * nx] = self.A_xv
        A[nx : 2 * nx, :nx] = self.A_vx
        A[2 * nx :, 2 * nx :] = self.S_blk
        if compensation_on:
            A[:nx, 2 * nx :] = -self.G_x @ self.C_blk
        G = np.vstack([self.G_x, np.zeros((nx, self.N)), self.B_blk])
        return LinearOdeSystem(A, G, self.signal)

    def initial_state(self, rng):
        return rng.uniform(-1.0, 1.0, size=self.state_dim)

    def compensation(self, y):
        return self.C_blk @ y[2 * self.nx :]

    def observe(self, t, y):
        return {
            "x": self.node_estimates(y),
            "v": self.node_duals(y),
            "omega_hat": self.frequencies,
            "e": np.zeros(self.N),
            "compensation": self.compensation(y),
        }


def known_freq_rhs(x, v, etas, problem, graph, kappa1, kappa2, z_meas, observers, compensation_on=True):
    """Per-node right-hand side; ``etas`` is a list of observer states."""
    H, A = problem.H, graph.weights
    comp = np.array([(ob.compensation_row @ eta).item() for ob, eta in zip(observers, etas)])
    y_in = np.asarray(z_meas, dtype=float) - (comp if compensation_on else 0.0)
    x_o = neighbor_disagreement(A, x)
    v_o = neighbor_disagreement(A, v)
    residual = np.einsum("ij,ij->i", H, x) - y_in
    dx = -kappa1 * H * residual[:, None] - (kappa1 + kappa2) * x_o - v_o
    dv = kappa1 * kappa2 * x_o
    detas = [ob.S_obs @ eta + ob.B[:, 0] * zi for ob, eta, zi in zip(observers, etas, z_meas)]
    return dx, dv, detas
