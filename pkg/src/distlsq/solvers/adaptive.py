"""Disturbance rejection with unknown frequencies.

Per node, a stable companion filter driven by the noisy measurement feeds a
gradient identifier for the coefficients of ``prod_j (s^2 + w_j^2)``.  At the
start of each step (every ``sylvester_stride`` steps) the frequencies are
recovered from the current estimates, ``S_hat`` is rebuilt, and
``T S_hat - S_filt T = B D`` is re-solved; the compensation row
``D0 T^{-1}`` is then held for the whole step.

Fallback: when recovery fails (e.g. estimates still near zero) or ``T`` is
singular or too ill-conditioned (``max_transform_condition``), the last
valid compensation row is kept; before the first valid
recovery the node runs uncompensated.  Transitions are logged in ``events``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ..disturbance import (
    freqs_from_poly,
    freqs_from_poly_batch,
    output_row,
    sinusoid_selector,
    skew_block_matrix,
)
from ..exceptions import ValidationError
from ..identifier import IdentifierState, gradient_update_rhs, identifier_output
from ..numerics import OdeSystem, solve_sylvester, solve_sylvester_batch
from .base import PrimalDualCore, constant_signal, neighbor_disagreement

T_COND_MAX = 1e2


def _per_node(value, n, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValidationError(f"{name} must be a scalar or have one entry per node ({n})")
    return arr


class AdaptiveSolver(PrimalDualCore):
    name = "adaptive"

    def __init__(
        self,
        problem,
        graph,
        filters,
        kappa1=1.0,
        kappa2=1.0,
        learning_rate=30.0,
        normalization_weight=1.0,
        signal=None,
        sylvester_stride=1,
        alpha_hat_init=None,
        max_transform_condition=T_COND_MAX,
    ):
        super().__init__(problem, graph, kappa1, kappa2)
        if len(filters) != self.N:
            raise ValidationError(f"need one filter per node ({self.N}), got {len(filters)}")
        if sylvester_stride < 1:
            raise ValidationError("sylvester_stride must be >= 1")
        self.filters = list(filters)
        self.signal = signal if signal is not None else constant_signal(problem.z)
        self.stride = int(sylvester_stride)
        self.max_cond = float(max_transform_condition)
        self.orders = np.array([f.order for f in self.filters])
        self.learning_rate = _per_node(learning_rate, self.N, "learning_rate")
        self.normalization_weight = _per_node(normalization_weight, self.N, "normalization_weight")
        if np.any(self.learning_rate <= 0) or np.any(self.normalization_weight < 0):
            raise ValidationError("learning rate must be positive and normalization weight nonnegative")

        dims = 2 * self.orders + 1
        self.eta_offsets = np.concatenate([[0], np.cumsum(dims)])
        self.alpha_offsets = np.concatenate([[0], np.cumsum(self.orders)])
        self.n_eta = int(self.eta_offsets[-1])
        self.n_alpha = int(self.alpha_offsets[-1])

        self.S_blk = scipy.linalg.block_diag(*[f.S for f in self.filters])
        self.B_blk = scipy.linalg.block_diag(*[f.B for f in self.filters])
        self.W_blk = scipy.linalg.block_diag(*[f.design_coeffs[None, :] for f in self.filters])
        self.regressor_index = np.concatenate(
            [self.eta_offsets[i] + 1 + 2 * np.arange(k) for i, k in enumerate(self.orders)]
        ).astype(int)
        self.owner = np.repeat(np.arange(self.N), self.orders)
        self.owner_sum = np.zeros((self.N, self.n_alpha))
        self.owner_sum[self.owner, np.arange(self.n_alpha)] = 1.0
        self.rate_k = self.learning_rate[self.owner]
        self.nu_k = self.normalization_weight[self.owner]

        if alpha_hat_init is None:
            alpha_hat_init = np.zeros(self.n_alpha)
        self.alpha_hat_init = np.asarray(alpha_hat_init, dtype=float).reshape(-1)
        if self.alpha_hat_init.shape != (self.n_alpha,):
            raise ValidationError(f"alpha_hat_init must have {self.n_alpha} entries")

        self._uniform = len(set(self.orders.tolist())) == 1 and self.orders[0] > 0
        if self._uniform:
            self._S_filt = np.stack([f.S for f in self.filters])
            self._BD = np.stack([f.B @ output_row(f.order) for f in self.filters])
        self.reset()

    # layout -------------------------------------------------------------

    @property
    def state_dim(self):
        return 2 * self.nx + self.n_eta + self.n_alpha

    def eta_slice(self, y):
        return y[2 * self.nx : 2 * self.nx + self.n_eta]

    def alpha_slice(self, y):
        return y[2 * self.nx + self.n_eta :]

    def node_alpha(self, alpha, i):
        return alpha[self.alpha_offsets[i] : self.alpha_offsets[i + 1]]

    def reset(self):
        """Forget the held compensation (start of a fresh run)."""
        self.C = np.zeros((self.N, self.n_eta))
        self.omega_hat = np.zeros(self.n_alpha)
        self.identified = np.zeros(self.N, dtype=bool)
        self.failing = np.zeros(self.N, dtype=bool)
        self.events = []
        self._steps = 0
        self.compensation_on = True
        self._build_linear_part()

    def initial_state(self, rng):
        y = rng.uniform(-1.0, 1.0, size=self.state_dim)
        y[2 * self.nx + self.n_eta :] = self.alpha_hat_init
        return y

    # held compensation ------------------------------------------------------

    def _log(self, t, node, kind, detail=""):
        self.events.append({"t": float(t), "node": int(node) + 1, "kind": kind, "detail": detail})

    def _set_rows(self, t, nodes, omegas, rows):
        """Install compensation rows for ``nodes`` and log status transitions."""
        for i, omega, row in zip(nodes, omegas, rows):
            a, b = self.eta_offsets[i], self.eta_offsets[i + 1]
            self.C[i, a:b] = row
            self.omega_hat[self.alpha_offsets[i] : self.alpha_offsets[i + 1]] = omega
            if not self.identified[i]:
                self._log(t, i, "identified", f"omega_hat={np.round(omega, 6).tolist()}")
            elif self.failing[i]:
                self._log(t, i, "recovered")
            self.identified[i] = True
            self.failing[i] = False
        self._coupling_dirty = True

    def _reject(self, t, i, reason):
        if self.identified[i] and not self.failing[i]:
            self._log(t, i, "fallback", reason)
        self.failing[i] = True

    def _refresh_uniform(self, t, alpha):
        k = int(self.orders[0])
        ok, freqs = freqs_from_poly_batch(alpha.reshape(self.N, k))
        for i in np.nonzero(~ok)[0]:
            self._reject(t, i, "frequencies not identifiable")
        idx = np.nonzero(ok)[0]
        if idx.size == 0:
            return
        n = 2 * k + 1
        S_hat = np.zeros((idx.size, n, n))
        rows = 1 + 2 * np.arange(k)
        S_hat[:, rows, rows + 1] = freqs[idx]
        S_hat[:, rows + 1, rows] = -freqs[idx]
        T, solved = solve_sylvester_batch(S_hat, self._S_filt[idx], self._BD[idx])
        good = solved.copy()
        if solved.any():
            good[solved] = np.linalg.cond(T[solved]) < self.max_cond
        for j in np.nonzero(~good)[0]:
            self._reject(t, idx[j], "singular Sylvester solution")
        if good.any():
            T_inv = np.linalg.inv(T[good])
            comp_rows = T_inv[:, 1::2, :].sum(axis=1)  # selector [0 1 0 ... 1 0] times T^{-1}
            self._set_rows(t, idx[good], freqs[idx[good]], comp_rows)

    def _refresh_mixed(self, t, alpha):
        for i in range(self.N):
            r = freqs_from_poly(self.node_alpha(alpha, i))
            if not r.ok:
                self._reject(t, i, r.reason)
                continue
            if self.orders[i] == 0:
                continue
            f = self.filters[i]
            sol = solve_sylvester(skew_block_matrix(r.frequencies), f.S, f.B, output_row(self.orders[i]))
            if sol.valid and np.linalg.cond(sol.T) < self.max_cond:
                row = sinusoid_selector(self.orders[i]) @ np.linalg.inv(sol.T)
                self._set_rows(t, [i], [r.frequencies], [row[0]])
            else:
                self._reject(t, i, sol.reason or "ill-conditioned Sylvester solution")

    def refresh(self, t, y):
        """Recover frequencies from the current estimates and re-solve for ``T``."""
        alpha = self.alpha_slice(y)
        if self._uniform:
            self._refresh_uniform(t, alpha)
        else:
            self._refresh_mixed(t, alpha)
        if self._coupling_dirty:
            self._update_coupling()

    def before_step(self, t, y):
        if self._steps % self.stride == 0:
            self.refresh(t, y)
        self._steps += 1

    # dynamics ---------------------------------------------------------------

    def _build_linear_part(self):
        nx, ne = self.nx, self.n_eta
        n_lin = 2 * nx + ne
        M = np.zeros((n_lin, n_lin))
        M[:nx, :nx] = self.A_xx
        M[:nx, nx : 2 * nx] = self.A_xv
        M[nx : 2 * nx, :nx] = self.A_vx
        M[2 * nx :, 2 * nx :] = self.S_blk
        self._M = M
        self._G = np.vstack([self.G_x, np.zeros((nx, self.N)), self.B_blk])
        self._n_lin = n_lin
        self._update_coupling()

    def _update_coupling(self):
        nx = self.nx
        if self.compensation_on:
            self._M[:nx, 2 * nx :] = -self.G_x @ self.C
        else:
            self._M[:nx, 2 * nx :] = 0.0
        self._coupling_dirty = False

    def _identifier_terms(self, eta, alpha, z_meas):
        eta_o = eta[self.regressor_index]
        z_out = self.W_blk @ eta - self.owner_sum @ (alpha * eta_o)
        e = z_out - z_meas
        norms = self.owner_sum @ (eta_o * eta_o)
        return e, eta_o, norms

    def rhs(self, t, y):
        n_lin = self._n_lin
        lin = y[:n_lin]
        alpha = y[n_lin:]
        z_meas = self.signal(t)
        d_lin = self._M @ lin + self._G @ z_meas
        e, eta_o, norms = self._identifier_terms(lin[2 * self.nx :], alpha, z_meas)
        dalpha = self.rate_k * e[self.owner] * eta_o / (1.0 + self.nu_k * norms[self.owner])
        return np.concatenate([d_lin, dalpha])

    def system(self, compensation_on=True):
        self.compensation_on = compensation_on
        self._update_coupling()
        return OdeSystem(rhs=self.rhs, state_dim=self.state_dim, before_step=self.before_step)

    def observe(self, t, y):
        eta = self.eta_slice(y)
        z_meas = np.asarray(self.signal(t), dtype=float).reshape(-1)
        e, _, _ = self._identifier_terms(eta, self.alpha_slice(y), z_meas)
        return {
            "x": self.node_estimates(y),
            "v": self.node_duals(y),
            "omega_hat": self.omega_hat.copy(),
            "alpha_hat": self.alpha_slice(y).copy(),
            "e": e,
            "compensation": self.C @ eta,
        }


def adaptive_rhs(
    x, v, etas, alpha_hats, problem, graph, kappa1, kappa2, z_meas, filters, identifiers, transforms,
    compensation_on=True,
):
    """Per-node right-hand side with explicitly supplied ``T`` matrices.

    ``transforms[i]`` is the current Sylvester solution for node ``i`` or
    ``None`` (no compensation yet).  ``identifiers[i].alpha_hat`` is ignored in
    favour of ``alpha_hats[i]``.
    """
    H, A = problem.H, graph.weights
    comp = np.zeros(len(filters))
    for i, (f, eta, T) in enumerate(zip(filters, etas, transforms)):
        if T is not None:
            comp[i] = (sinusoid_selector(f.order) @ np.linalg.solve(T, eta)).item()
    y_in = np.asarray(z_meas, dtype=float) - (comp if compensation_on else 0.0)
    x_o = neighbor_disagreement(A, x)
    v_o = neighbor_disagreement(A, v)
    residual = np.einsum("ij,ij->i", H, x) - y_in
    dx = -kappa1 * H * residual[:, None] - (kappa1 + kappa2) * x_o - v_o
    dv = kappa1 * kappa2 * x_o
    detas, dalphas = [], []
    for f, ident, eta, a_hat, zi in zip(filters, identifiers, etas, alpha_hats, z_meas):
        detas.append(f.S @ eta + f.B[:, 0] * zi)
        state = IdentifierState(a_hat, ident.learning_rate, ident.normalization_weight)
        e = identifier_output(f, state, eta) - zi
        dalphas.append(gradient_update_rhs(state, e, eta))
    return dx, dv, detas, dalphas

