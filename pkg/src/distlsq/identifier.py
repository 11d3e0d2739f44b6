"""Stable measurement filter and gradient identifier for the disturbance polynomial.

Dimensions for a node with ``k`` sinusoids (``n = 2k + 1``)::

    design coefficients  (b0, a1, b1, ..., ak, bk)      length n
    filter matrix        companion, last row = -coeffs   n x n
    filter input         B = [0, ..., 0, 1]^T             n x 1
    regressor            eta_o = eta[1::2]                length k  (0-based 1, 3, ...)
    estimate             alpha_hat                        length k

The identifier output is ``(coeffs - alpha_hat at positions 1, 3, ...) . eta``;
with ``alpha_hat`` equal to the true coefficients it reproduces the measurement
up to an exponentially decaying filter transient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionError, NotHurwitzError, ValidationError


def companion_matrix(coeffs):
    """Top-companion matrix whose last row is ``-coeffs``."""
    coeffs = np.asarray(coeffs, dtype=float).reshape(-1)
    n = coeffs.size
    S = np.zeros((n, n))
    S[:-1, 1:] = np.eye(n - 1)
    S[-1, :] = -coeffs
    return S


def is_hurwitz(M):
    return bool(np.all(np.linalg.eigvals(M).real < 0))


def is_controllable(A, B, rtol=1e-9):
    n = A.shape[0]
    cols = [B]
    for _ in range(n - 1):
        cols.append(A @ cols[-1])
    sv = np.linalg.svd(np.hstack(cols), compute_uv=False)
    return bool(sv[-1] > rtol * sv[0])


@dataclass(frozen=True)
class FilterBank:
    S: np.ndarray
    B: np.ndarray
    design_coeffs: np.ndarray = field(repr=False)

    @property
    def order(self):
        return (self.S.shape[0] - 1) // 2

    @property
    def dim(self):
        return self.S.shape[0]


def build_filter(k, design_coeffs):
    """Companion filter for ``k`` sinusoids; rejects non-Hurwitz designs."""
    coeffs = np.asarray(design_coeffs, dtype=float).reshape(-1)
    if coeffs.size != 2 * k + 1:
        raise DimensionError(f"expected {2 * k + 1} filter coefficients for k = {k}, got {coeffs.size}")
    S = companion_matrix(coeffs)
    eigs = np.linalg.eigvals(S)
    if not np.all(eigs.real < 0):
        bad = eigs[eigs.real >= 0]
        raise NotHurwitzError(f"filter matrix is not Hurwitz; offending eigenvalues {bad}", eigenvalues=bad)
    B = np.zeros((2 * k + 1, 1))
    B[-1, 0] = 1.0
    return FilterBank(S=S, B=B, design_coeffs=coeffs)


def binomial_design(k, pole=2.0):
    """Coefficients of ``(s + pole)^{2k+1}`` in filter order (constant term first)."""
    c = np.poly(np.full(2 * k + 1, -float(pole)))
    return c[1:][::-1].copy()


def filter_step_rhs(f, eta, z_meas):
    return f.S @ eta + f.B[:, 0] * z_meas


def regressor(eta):
    """``eta_o``: the components multiplying the unknown coefficients."""
    return np.asarray(eta)[1::2]


@dataclass
class IdentifierState:
    alpha_hat: np.ndarray
    learning_rate: float = 30.0
    normalization_weight: float = 0.0

    def __post_init__(self):
        self.alpha_hat = np.array(self.alpha_hat, dtype=float).reshape(-1)
        if not self.learning_rate > 0:
            raise ValidationError(f"learning rate must be positive, got {self.learning_rate}")
        if self.normalization_weight < 0:
            raise ValidationError(f"normalization weight must be >= 0, got {self.normalization_weight}")


def output_row(f, alpha_hat):
    row = f.design_coeffs.copy()
    row[1::2] -= np.asarray(alpha_hat, dtype=float)
    return row


def identifier_output(f, ident, eta):
    return float(output_row(f, ident.alpha_hat) @ eta)


def identifier_error(z_out, z_meas):
    return z_out - z_meas


def gradient_update_rhs(ident, e, eta):
    """``l e eta_o``, divided by ``1 + nu |eta_o|^2`` when ``nu > 0``."""
    eta_o = regressor(eta)
    grad = ident.learning_rate * e * eta_o
    if ident.normalization_weight > 0:
        grad = grad / (1.0 + ident.normalization_weight * float(eta_o @ eta_o))
    return grad
