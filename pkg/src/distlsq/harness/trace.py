"""Recorded simulation signals, CSV export and convergence metrics."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError

LOG_FLOOR = 1e-300


@dataclass
class Trace:
    """Time-indexed recording of one run.

    ``x`` and ``v`` have shape ``(T, N, m)``; ``omega_hat`` is ``(T, K)`` with
    ``K`` the total number of tracked frequencies (``orders`` gives the per-node
    split); ``e`` and ``compensation`` are ``(T, N)``.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    omega_hat: np.ndarray
    e: np.ndarray
    compensation: np.ndarray
    y_star: np.ndarray
    orders: tuple = ()
    events: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def node_count(self):
        return self.x.shape[1]

    @property
    def dimension(self):
        return self.x.shape[2]

    def __len__(self):
        return len(self.t)

    @classmethod
    def empty(cls, node_count, dimension, orders=(), y_star=None):
        K = int(sum(orders))
        return cls(
            t=np.zeros(0),
            x=np.zeros((0, node_count, dimension)),
            v=np.zeros((0, node_count, dimension)),
            omega_hat=np.zeros((0, K)),
            e=np.zeros((0, node_count)),
            compensation=np.zeros((0, node_count)),
            y_star=np.zeros(dimension) if y_star is None else np.asarray(y_star, dtype=float),
            orders=tuple(orders),
        )

    def node_errors(self):
        """``|x_i(t) - y*|`` per node, shape ``(T, N)``."""
        return np.linalg.norm(self.x - self.y_star, axis=2)

    def stacked_error(self):
        """``|x(t) - 1 (x) y*|``, shape ``(T,)``."""
        return np.linalg.norm((self.x - self.y_star).reshape(len(self.t), -1), axis=1)

    def mask(self, t0=None, t1=None):
        m = np.ones(len(self.t), dtype=bool)
        if t0 is not None:
            m &= self.t >= t0
        if t1 is not None:
            m &= self.t <= t1
        return m

    def dual_sum(self):
        """``sum_i v_i(t)``, shape ``(T, m)``."""
        return self.v.sum(axis=1)

    def ripple(self, t0, t1=None):
        """Per-node, per-component peak-to-peak of ``x`` over a window, shape ``(N, m)``."""
        w = self.x[self.mask(t0, t1)]
        return w.max(axis=0) - w.min(axis=0)

    def is_finite(self):
        return all(
            np.all(np.isfinite(a)) for a in (self.t, self.x, self.v, self.omega_hat, self.e, self.compensation)
        )

    # CSV ------------------------------------------------------------------

    def column_names(self):
        N, m = self.node_count, self.dimension
        cols = ["t"]
        cols += [f"x_{i + 1}_{j + 1}" for i in range(N) for j in range(m)]
        cols += [f"v_{i + 1}_{j + 1}" for i in range(N) for j in range(m)]
        for i, k in enumerate(self.orders):
            cols += [f"omega_hat_{i + 1}"] if k == 1 else [f"omega_hat_{i + 1}_{j + 1}" for j in range(k)]
        cols += [f"e_{i + 1}" for i in range(N)]
        cols += [f"compensation_{i + 1}" for i in range(N)]
        return cols

    def as_matrix(self):
        T, N, m = len(self.t), self.node_count, self.dimension
        return np.hstack(
            [
                self.t[:, None],
                self.x.reshape(T, N * m),
                self.v.reshape(T, N * m),
                self.omega_hat.reshape(T, self.omega_hat.shape[-1]),
                self.e,
                self.compensation,
            ]
        )


def export_csv(trace, path):
    """One row per recorded time point; floats written with round-trip precision."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(trace.column_names())
            for row in trace.as_matrix():
                writer.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc
    return path


def read_csv(path):
    """Header and data matrix of a file written by :func:`export_csv`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, data


def fit_decay_rate(trace_or_t, errors=None, window=None, min_samples=10):
    """Least-squares slope of ``log |x(t) - 1 (x) y*|`` against ``t``.

    Accepts a :class:`Trace` (uses the stacked error) or explicit ``t`` and
    ``errors`` arrays.  Errors are clipped at a tiny floor before the log.
    """
    if isinstance(trace_or_t, Trace):
        t, err = trace_or_t.t, trace_or_t.stacked_error()
    else:
        t, err = np.asarray(trace_or_t, dtype=float), np.asarray(errors, dtype=float)
    if window is not None:
        sel = (t >= window[0]) & (t <= window[1])
        t, err = t[sel], err[sel]
    if len(t) < min_samples:
        raise ValidationError(f"decay-rate window has {len(t)} samples, need at least {min_samples}")
    slope, _ = np.polyfit(t, np.log(np.maximum(err, LOG_FLOOR)), 1)
    return float(slope)
