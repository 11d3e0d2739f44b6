"""Observability matrices and the parallel-connection observability test."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from ..exceptions import ValidationError

DISJOINT_RTOL = 1e-8
RANK_RTOL = 1e-9


def observability_matrix(D, S):
    """Stack ``D, D S, ..., D S^{n-1}``."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    D = np.atleast_2d(np.asarray(D, dtype=float))
    n = S.shape[0]
    rows = [D]
    for _ in range(n - 1):
        rows.append(rows[-1] @ S)
    return np.vstack(rows)


def numerical_rank(M, rtol=RANK_RTOL):
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def is_observable(D, S, rtol=RANK_RTOL):
    S = np.atleast_2d(S)
    return numerical_rank(observability_matrix(D, S), rtol) == S.shape[0]


def spectra_disjoint(A1, A2, rtol=DISJOINT_RTOL):
    e1 = np.linalg.eigvals(np.atleast_2d(A1))
    e2 = np.linalg.eigvals(np.atleast_2d(A2))
    scale = max(1.0, np.abs(e1).max(initial=0.0), np.abs(e2).max(initial=0.0))
    gap = np.abs(e1[:, None] - e2[None, :]).min()
    return bool(gap > rtol * scale)


def parallel_observability_check(psi1, A1, psi2, A2):
    """Is ``([psi1, psi2], blkdiag(A1, A2))`` observable?

    Both sub-pairs must be observable; the pair is then observable exactly when
    ``A1`` and ``A2`` have no common eigenvalue.
    """
    if not is_observable(psi1, A1):
        raise ValidationError("first pair is not observable")
    if not is_observable(psi2, A2):
        raise ValidationError("second pair is not observable")
    return spectra_disjoint(A1, A2)


def parallel_pair(psi1, A1, psi2, A2):
    """The block pair ``([psi1, psi2], blkdiag(A1, A2))``."""
    psi = np.hstack([np.atleast_2d(psi1), np.atleast_2d(psi2)])
    return psi, scipy.linalg.block_diag(np.atleast_2d(A1), np.atleast_2d(A2))
