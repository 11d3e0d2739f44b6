"""Communication digraphs: Laplacian, balance/connectivity checks, spectral constants.

Adjacency convention: ``weights[i, j] > 0`` iff node ``i`` receives information
from node ``j`` (an edge ``j -> i``).  Edge lists are given as ``src dst weight``
with 1-indexed nodes, so the edge ``1 -> 3`` sets ``weights[2, 0]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .exceptions import AssumptionError, DimensionError, ValidationError

BALANCE_TOL = 1e-12
EIG_RTOL = 1e-9


@dataclass(frozen=True)
class Digraph:
    """Weighted digraph over ``node_count`` nodes."""

    weights: np.ndarray

    def __post_init__(self):
        A = np.array(self.weights, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise DimensionError(f"adjacency must be a nonempty square matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValidationError("adjacency contains non-finite weights")
        if np.any(A < 0):
            raise ValidationError("adjacency weights must be nonnegative")
        if np.any(np.diag(A) != 0):
            raise ValidationError("adjacency diagonal must be zero (no self loops)")
        A.setflags(write=False)
        object.__setattr__(self, "weights", A)

    @property
    def node_count(self):
        return self.weights.shape[0]

    @classmethod
    def from_edges(cls, edges, node_count=None):
        """Build from ``(src, dst[, weight])`` tuples with 1-indexed nodes."""
        edges = [tuple(e) for e in edges]
        if node_count is None:
            node_count = max((max(e[0], e[1]) for e in edges), default=0)
        A = np.zeros((node_count, node_count))
        for k, e in enumerate(edges):
            if len(e) not in (2, 3):
                raise ValidationError("edge must be (src, dst) or (src, dst, weight)", f"edges[{k}]")
            src, dst = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) == 3 else 1.0
            if not (1 <= src <= node_count and 1 <= dst <= node_count):
                raise ValidationError(f"node index out of range 1..{node_count}", f"edges[{k}]")
            if src == dst:
                raise ValidationError("self loops are not allowed", f"edges[{k}]")
            A[dst - 1, src - 1] += w
        return cls(A)

    def edges(self):
        """Edge list ``(src, dst, weight)`` with 1-indexed nodes."""
        dst, src = np.nonzero(self.weights)
        return [(int(s) + 1, int(d) + 1, float(self.weights[d, s])) for d, s in zip(dst, src)]

    def is_symmetric(self, tol=BALANCE_TOL):
        return bool(np.allclose(self.weights, self.weights.T, rtol=0.0, atol=tol))


@dataclass(frozen=True)
class GraphSpectrum:
    laplacian: np.ndarray
    sym_eigenvalues: np.ndarray
    complement: np.ndarray = field(repr=False)

    @property
    def algebraic_connectivity(self):
        return float(self.sym_eigenvalues[1])

    @property
    def max_eig(self):
        return float(self.sym_eigenvalues[-1])


def laplacian(g):
    """``L = D_in - A`` where ``D_in`` holds the row sums (in-degrees)."""
    A = g.weights
    return np.diag(A.sum(axis=1)) - A


def degree_imbalance(g):
    """Per-node ``in-degree - out-degree``."""
    A = g.weights
    return A.sum(axis=1) - A.sum(axis=0)


def is_weight_balanced(g, tol=BALANCE_TOL):
    """Return ``(balanced, imbalance)`` with the per-node degree differences."""
    imbalance = degree_imbalance(g)
    return bool(np.all(np.abs(imbalance) <= tol)), imbalance


def _reachable(adj_out, start):
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in adj_out[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def is_strongly_connected(g):
    """Exact reachability test: every node reachable from node 0 and vice versa."""
    A = g.weights
    n = g.node_count
    if n == 1:
        return True
    # information flows j -> i when A[i, j] > 0
    forward = [np.nonzero(A[:, j])[0].tolist() for j in range(n)]
    backward = [np.nonzero(A[i, :])[0].tolist() for i in range(n)]
    return len(_reachable(forward, 0)) == n and len(_reachable(backward, 0)) == n


def build_complement(n):
    """Deterministic ``n x (n-1)`` orthonormal basis of the complement of ``1_n``.

    Satisfies ``R.T @ 1 = 0``, ``R.T @ R = I`` and ``R @ R.T + 11^T/n = I``.
    """
    if n < 2:
        raise DimensionError(f"complement matrix needs n >= 2, got {n}")
    M = np.hstack([np.ones((n, 1)), np.eye(n)[:, : n - 1]])
    Q, _ = np.linalg.qr(M)
    return Q[:, 1:]


def spectrum(g):
    """Laplacian, sorted eigenvalues of ``Sym(L)`` and the complement matrix.

    Raises ``AssumptionError`` unless the graph is weight-balanced and strongly
    connected.
    """
    if g.node_count < 2:
        raise AssumptionError("at least two nodes are required")
    balanced, imbalance = is_weight_balanced(g)
    if not balanced:
        worst = int(np.argmax(np.abs(imbalance)))
        raise AssumptionError(
            f"digraph is not weight-balanced (node {worst + 1}: in - out = {imbalance[worst]:.3g})"
        )
    if not is_strongly_connected(g):
        raise AssumptionError("digraph is not strongly connected")
    L = laplacian(g)
    eigs = np.linalg.eigvalsh(0.5 * (L + L.T))
    scale = max(1.0, float(np.abs(eigs).max()))
    eigs = np.where(np.abs(eigs) <= EIG_RTOL * scale, 0.0, eigs)
    return GraphSpectrum(laplacian=L, sym_eigenvalues=eigs, complement=build_complement(g.node_count))


def four_node_digraph():
    """Reference four-node digraph: cycles 1->3->2->1 and 3<->4, unit weights."""
    return Digraph.from_edges([(1, 3), (3, 2), (2, 1), (3, 4), (4, 3)], node_count=4)
