"""Row-partitioned least-squares data, the centralized oracle and the gain certificate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DimensionError, ValidationError

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class LsqProblem:
    """Node ``i`` knows row ``H[i]`` and the nominal measurement ``z[i]``.

    ``H`` is ``N x m`` with full column rank.
    """

    H: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        H = np.atleast_2d(np.array(self.H, dtype=float))
        z = np.array(self.z, dtype=float).reshape(-1)
        if H.ndim != 2:
            raise DimensionError(f"H must be a matrix, got ndim={H.ndim}")
        n, m = H.shape
        if z.shape[0] != n:
            raise DimensionError(f"z has {z.shape[0]} entries but H has {n} rows")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(z))):
            raise ValidationError("H and z must be finite")
        if n < m:
            raise ValidationError(f"need at least m = {m} rows for full column rank, got {n}")
        sv = np.linalg.svd(H, compute_uv=False)
        if sv[-1] <= RANK_RTOL * sv[0]:
            raise ValidationError(
                f"H is rank deficient (singular values {sv[-1]:.3g} / {sv[0]:.3g})"
            )
        H.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "z", z)

    @property
    def node_count(self):
        return self.H.shape[0]

    @property
    def dimension(self):
        return self.H.shape[1]

    def row(self, i):
        return self.H[i]


def least_squares_oracle(p):
    """Minimizer of ``||z - H y||^2`` via a QR solve (no explicit inverse)."""
    Q, R = np.linalg.qr(p.H)
    return scipy.linalg.solve_triangular(R, Q.T @ p.z)


def lambda_bounds(p):
    """Smallest and largest eigenvalue of ``H^T H``."""
    eigs = np.linalg.eigvalsh(p.H.T @ p.H)
    return float(eigs[0]), float(eigs[-1])


@dataclass(frozen=True)
class GainCertificate:
    kappa1: float
    kappa2: float
    lambda_lower: float
    lambda_upper: float
    kappa2_bound: float
    satisfied: bool


def kappa2_bound(kappa1, lambda_lower, lambda_upper, node_count):
    """Sufficient lower bound on ``kappa2`` for exponential convergence of the exact solver."""
    return (
        6.0 * node_count * lambda_upper**4 * kappa1**2 / lambda_lower**4
        * max(1.0, 1.0 / lambda_lower)
    )


def certify_gains(kappa1, kappa2, graph_spectrum, p):
    """Evaluate the sufficient gain condition.

    An unsatisfied certificate is advisory only: the bound is conservative and
    the reference experiment itself runs with ``kappa1 = kappa2 = 1``.
    """
    if not (kappa1 > 0 and kappa2 > 0):
        raise ValidationError(f"gains must be positive, got kappa1={kappa1}, kappa2={kappa2}")
    lam_h, lam_H = lambda_bounds(p)
    lower = min(graph_spectrum.algebraic_connectivity, lam_h)
    upper = max(graph_spectrum.max_eig, lam_H)
    bound = kappa2_bound(kappa1, lower, upper, graph_spectrum.laplacian.shape[0])
    return GainCertificate(
        kappa1=float(kappa1),
        kappa2=float(kappa2),
        lambda_lower=lower,
        lambda_upper=upper,
        kappa2_bound=bound,
        satisfied=bool(kappa1 >= 1 and kappa2 >= bound),
    )


def minimal_kappa2(kappa1, graph_spectrum, p):
    """Smallest integer ``kappa2`` meeting the bound (``math.ceil`` of it)."""
    lam_h, lam_H = lambda_bounds(p)
    lower = min(graph_spectrum.algebraic_connectivity, lam_h)
    upper = max(graph_spectrum.max_eig, lam_H)
    return math.ceil(kappa2_bound(kappa1, lower, upper, graph_spectrum.laplacian.shape[0]))


REFERENCE_H = np.array(
    [
        [0.0479, 0.0176],
        [0.7514, 0.0724],
        [0.5931, 0.2320],
        [0.1329, 0.5721],
    ]
)
REFERENCE_Z = np.array([10.0, 20.0, 30.0, 40.0])


def reference_problem():
    """Four-row, two-column reference instance used by the builtin scenarios."""
    return LsqProblem(REFERENCE_H, REFERENCE_Z)
