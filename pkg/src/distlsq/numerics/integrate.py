"""Classic fixed-step fourth-order Runge-Kutta integration.

Two paths share the same arithmetic:

* :class:`OdeSystem` -- arbitrary right-hand side, stepped stage by stage.
* :class:`LinearOdeSystem` -- ``y' = A y + G u(t)``.  One RK4 step of a linear
  system is itself linear, ``y+ = P y + Q0 u(t) + Qh u(t + h/2) + Q1 u(t + h)``,
  so the stage algebra is folded into four matrices once and the loop is a
  single matrix-vector product per step.  Results agree with the generic path
  to rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..exceptions import IntegrationError, ValidationError

_CHUNK = 8192


@dataclass
class OdeSystem:
    """``rhs(t, y)`` must not mutate ``y``.

    ``before_step(t, y)``, when given, is called once at the start of every
    step; solvers use it to refresh quantities held constant over a step.
    """

    rhs: Callable[[float, np.ndarray], np.ndarray]
    state_dim: int
    before_step: Optional[Callable[[float, np.ndarray], None]] = None


@dataclass
class LinearOdeSystem:
    """``y' = A y + G u(t)``; ``u`` must accept an array of times and return ``(len(t), p)``."""

    A: np.ndarray
    G: Optional[np.ndarray] = None
    u: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def state_dim(self):
        return self.A.shape[0]

    def rhs(self, t, y):
        out = self.A @ y
        if self.G is not None:
            out = out + self.G @ np.asarray(self.u(np.array([t]))).reshape(-1)
        return out


def rk4_step(rhs, t, y, h):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagators(A, G, h):
    """Matrices ``(P, Q0, Qh, Q1)`` of one RK4 step for ``y' = A y + G u``."""
    n = A.shape[0]
    p = 0 if G is None else G.shape[1]
    I = np.eye(n)
    zero = np.zeros((n, p))
    # each stage k = Ky y + K0 u0 + Kh uh + K1 u1
    k1 = (A, G if p else zero, zero, zero)
    k2 = (A @ (I + 0.5 * h * k1[0]), 0.5 * h * A @ k1[1], 0.5 * h * A @ k1[2] + (G if p else zero), 0.5 * h * A @ k1[3])
    k3 = (A @ (I + 0.5 * h * k2[0]), 0.5 * h * A @ k2[1], 0.5 * h * A @ k2[2] + (G if p else zero), 0.5 * h * A @ k2[3])
    k4 = (A @ (I + h * k3[0]), h * A @ k3[1], h * A @ k3[2], h * A @ k3[3] + (G if p else zero))
    P = I + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    Q = [(h / 6.0) * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]) for j in (1, 2, 3)]
    return P, Q[0], Q[1], Q[2]


def _step_count(t0, t1, dt):
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if not t1 > t0:
        raise ValidationError(f"t1 must exceed t0 (t0={t0}, t1={t1})")
    n = math.ceil((t1 - t0) / dt - 1e-9)
    return max(n, 1)


def integrate(system, t0, t1, dt, y0, sink=None, decimation=1, record_start=True):
    """Integrate from ``t0`` to exactly ``t1`` with step ``dt`` (last step shortened).

    ``sink(t, y)`` receives the state at ``t0`` (when ``record_start``), at every
    ``decimation``-th step and at ``t1``.  Raises :class:`IntegrationError` with
    the time of the first non-finite state.
    """
    if decimation < 1:
        raise ValidationError(f"decimation must be >= 1, got {decimation}")
    y = np.array(y0, dtype=float).reshape(-1)
    if y.shape[0] != system.state_dim:
        raise ValidationError(f"state has {y.shape[0]} entries, system expects {system.state_dim}")
    n = _step_count(t0, t1, dt)
    times = t0 + dt * np.arange(n + 1, dtype=float)
    times[-1] = t1
    if sink is not None and record_start:
        sink(float(times[0]), y.copy())
    # blow-up is reported through IntegrationError, not floating-point warnings
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(system, LinearOdeSystem):
            return _integrate_linear(system, times, dt, y, sink, decimation)
        return _integrate_general(system, times, y, sink, decimation)


def _integrate_general(system, times, y, sink, decimation):
    n = len(times) - 1
    for k in range(n):
        t, h = times[k], times[k + 1] - times[k]
        if system.before_step is not None:
            system.before_step(t, y)
        y = rk4_step(system.rhs, t, y, h)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("non-finite state", float(times[k + 1]))
        if sink is not None and ((k + 1) % decimation == 0 or k + 1 == n):
            sink(float(times[k + 1]), y.copy())
    return y


def _integrate_linear(system, times, dt, y, sink, decimation):
    A, G = system.A, system.G
    n = len(times) - 1
    last_h = times[-1] - times[-2]
    full = rk4_propagators(A, G, dt)
    short = full if abs(last_h - dt) <= 1e-12 * max(1.0, dt) else rk4_propagators(A, G, last_h)
    P = full[0]
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        steps = np.arange(start, stop)
        if G is not None:
            t_a = times[steps]
            h = times[steps + 1] - t_a
            U0 = np.asarray(system.u(t_a))
            Uh = np.asarray(system.u(t_a + 0.5 * h))
            U1 = np.asarray(system.u(times[steps + 1]))
            forcing = U0 @ full[1].T + Uh @ full[2].T + U1 @ full[3].T
            if stop == n and short is not full:
                forcing[-1] = short[1] @ U0[-1] + short[2] @ Uh[-1] + short[3] @ U1[-1]
        else:
            forcing = np.zeros((stop - start, y.shape[0]))
        states = np.empty((stop - start, y.shape[0]))
        for j in range(stop - start):
            if start + j == n - 1 and short is not full:
                y = short[0] @ y + forcing[j]
            else:
                y = P @ y + forcing[j]
            states[j] = y
        bad = ~np.all(np.isfinite(states), axis=1)
        if bad.any():
            first = int(np.argmax(bad))
            raise IntegrationError("non-finite state", float(times[start + first + 1]))
        if sink is not None:
            for j in range(stop - start):
                k = start + j + 1
                if k % decimation == 0 or k == n:
                    sink(float(times[k]), states[j].copy())
    return y
