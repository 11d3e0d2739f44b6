"""scikit-learn style wrapper: solve ``min |z - H y|`` by simulating the network.

Each sample (row of ``H`` with its target) is one node.  ``fit`` integrates
the chosen solver variant and stores the consensus estimate as ``coef_``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .exceptions import ValidationError
from .graph import Digraph, spectrum
from .harness.config import parse_config
from .harness.run import run_scenario
from .problem import certify_gains


def ring_digraph(n):
    """Bidirectional unit-weight ring; balanced and strongly connected for ``n >= 2``."""
    A = np.zeros((n, n))
    for i in range(n):
        A[i, (i + 1) % n] = A[(i + 1) % n, i] = 1.0
    np.fill_diagonal(A, 0.0)
    return Digraph(A)


class DistributedLeastSquares(RegressorMixin, BaseEstimator):
    """Least-squares regression computed by a simulated multi-agent solver.

    Parameters
    ----------
    graph : Digraph, array-like or None
        Communication digraph (``a_ij > 0`` when node ``i`` hears node ``j``).
        ``None`` uses a bidirectional ring over the samples.
    variant : {"exact", "none", "known_freq", "adaptive", "washout"}
    kappa1, kappa2 : float
        Solver gains.
    disturbance : list or None
        Per-node lists of ``[amplitude, frequency, phase]`` added to the targets.
    observer_poles, filter_coeffs, learning_rate, normalization_weight, washout_pole
        Variant-specific settings, see :mod:`distlsq.harness.config`.
    t_end, dt, decimation : float, float, int
        Horizon, step and recording stride.
    random_state : int
        Seed for the initial state.

    Attributes
    ----------
    coef_ : ndarray of shape (n_features,)
        Mean of the node estimates at ``t_end``.
    node_coef_ : ndarray of shape (n_samples, n_features)
    trace_ : Trace
    certificate_ : GainCertificate
    n_features_in_ : int
    """

    def __init__(
        self,
        graph=None,
        variant="exact",
        kappa1=1.0,
        kappa2=1.0,
        disturbance=None,
        observer_poles=None,
        filter_coeffs=(8.0, 12.0, 6.0),
        learning_rate=30.0,
        normalization_weight=1.0,
        washout_pole=0.4,
        t_end=100.0,
        dt=1e-3,
        decimation=100,
        random_state=0,
    ):
        self.graph = graph
        self.variant = variant
        self.kappa1 = kappa1
        self.kappa2 = kappa2
        self.disturbance = disturbance
        self.observer_poles = observer_poles
        self.filter_coeffs = filter_coeffs
        self.learning_rate = learning_rate
        self.normalization_weight = normalization_weight
        self.washout_pole = washout_pole
        self.t_end = t_end
        self.dt = dt
        self.decimation = decimation
        self.random_state = random_state

    def _graph(self, n):
        if self.graph is None:
            return ring_digraph(n)
        g = self.graph if isinstance(self.graph, Digraph) else Digraph(np.asarray(self.graph, dtype=float))
        if g.node_count != n:
            raise ValidationError(f"graph has {g.node_count} nodes but there are {n} samples", "graph")
        return g

    def _config(self, H, z):
        g = self._graph(H.shape[0])
        solver = {
            "variant": self.variant,
            "kappa1": self.kappa1,
            "kappa2": self.kappa2,
            "filter_coeffs": list(self.filter_coeffs),
            "learning_rate": self.learning_rate,
            "normalization_weight": self.normalization_weight,
            "washout_pole": self.washout_pole,
        }
        if self.observer_poles is not None:
            solver["observer_poles"] = self.observer_poles
        raw = {
            "name": "estimator",
            "problem": {"H": H.tolist(), "z": z.tolist()},
            "graph": {"nodes": g.node_count, "adjacency": g.weights.tolist()},
            "solver": solver,
            "simulation": {
                "t_end": self.t_end,
                "dt": self.dt,
                "decimation": self.decimation,
                "seed": self.random_state,
            },
        }
        if self.disturbance is not None:
            raw["disturbance"] = {"nodes": self.disturbance}
        return parse_config(raw)

    def fit(self, X, y):
        """Run the network on rows ``X`` (one per node) and targets ``y``."""
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[0] < 2:
            raise ValidationError("need at least two samples (nodes)", "X")
        cfg = self._config(X, y)
        self.certificate_ = certify_gains(cfg.solver.kappa1, cfg.solver.kappa2, spectrum(cfg.graph), cfg.problem)
        self.trace_ = run_scenario(cfg)
        self.node_coef_ = self.trace_.x[-1].copy()
        self.coef_ = self.node_coef_.mean(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(f"expected {self.n_features_in_} features, got {X.shape[1]}", "X")
        return X @ self.coef_
