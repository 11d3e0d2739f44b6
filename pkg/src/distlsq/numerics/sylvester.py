"""Dense solver for ``T S_hat - S_tilde T = B D`` (small matrices).

The equation is rewritten in vectorized unknowns::

    (S_hat^T kron I - I kron S_tilde) vec(T) = vec(B D)

with column-major ``vec``.  It is uniquely solvable iff ``S_hat`` and
``S_tilde`` share no eigenvalue; with a skew/marginal ``S_hat`` and a Hurwitz
``S_tilde`` this holds structurally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RESIDUAL_RTOL = 1e-10
SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class SylvesterSolution:
    T: np.ndarray
    residual_norm: float
    valid: bool
    reason: str = ""


def sylvester_residual(T, S_hat, S_tilde, B, D):
    return float(np.linalg.norm(T @ S_hat - S_tilde @ T - B @ D))


def _kron_operator(S_hat, S_tilde):
    n = S_tilde.shape[0]
    p = S_hat.shape[0]
    return np.kron(S_hat.T, np.eye(n)) - np.kron(np.eye(p), S_tilde)


def solve_sylvester(S_hat, S_tilde, B, D):
    """Solve for ``T``; failures are reported in the returned solution, not raised."""
    S_hat = np.atleast_2d(np.asarray(S_hat, dtype=float))
    S_tilde = np.atleast_2d(np.asarray(S_tilde, dtype=float))
    B = np.asarray(B, dtype=float).reshape(S_tilde.shape[0], -1)
    D = np.asarray(D, dtype=float).reshape(-1, S_hat.shape[0])
    n, p = S_tilde.shape[0], S_hat.shape[0]
    K = _kron_operator(S_hat, S_tilde)
    rhs = (B @ D).reshape(-1, order="F")
    sv = np.linalg.svd(K, compute_uv=False)
    if sv[-1] <= SINGULAR_RTOL * sv[0]:
        return SylvesterSolution(np.full((n, p), np.nan), np.inf, False, "common eigenvalues")
    T = np.linalg.solve(K, rhs).reshape((n, p), order="F")
    res = sylvester_residual(T, S_hat, S_tilde, B, D)
    scale = (np.linalg.norm(S_hat) + np.linalg.norm(S_tilde)) * max(np.linalg.norm(T), 1.0)
    if res > RESIDUAL_RTOL * max(scale, 1.0):
        return SylvesterSolution(T, res, False, "residual too large")
    if n == p:
        tv = np.linalg.svd(T, compute_uv=False)
        if tv[-1] <= SINGULAR_RTOL * max(tv[0], 1.0):
            return SylvesterSolution(T, res, False, "singular solution")
    return SylvesterSolution(T, res, True)


def solve_sylvester_batch(S_hat, S_tilde, BD):
    """Stacked solve for ``(N, n, n)`` arrays of equal size; returns ``(T, ok)``.

    Used on the hot path of the adaptive solver, where the per-node matrices
    are refreshed every step.
    """
    N, n, _ = S_tilde.shape
    eye = np.eye(n)
    K = np.einsum("bji,kl->bikjl", S_hat, eye).reshape(N, n * n, n * n)
    K -= np.einsum("ij,bkl->bikjl", eye, S_tilde).reshape(N, n * n, n * n)
    rhs = np.swapaxes(BD, 1, 2).reshape(N, n * n)
    try:
        vec = np.linalg.solve(K, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.full((N, n, n), np.nan), np.zeros(N, dtype=bool)
    T = np.swapaxes(vec.reshape(N, n, n), 1, 2)
    ok = np.all(np.isfinite(T), axis=(1, 2))
    return T, ok
