"""Turn a :class:`ScenarioConfig` into a solver model and simulate it."""

from __future__ import annotations

import logging

import numpy as np

from ..disturbance import band_limited_noise, measurement_signal
from ..exceptions import ValidationError
from ..graph import spectrum
from ..identifier import build_filter
from ..numerics import integrate
from ..problem import certify_gains, least_squares_oracle
from ..solvers import (
    AdaptiveSolver,
    ExactSolver,
    KnownFrequencySolver,
    UncompensatedSolver,
    WashoutSolver,
)
from ..solvers.base import add_signals, constant_signal
from .trace import Trace, fit_decay_rate

log = logging.getLogger(__name__)


def _filters(cfg):
    spec = cfg.disturbance
    coeffs = cfg.solver.filter_coeffs
    per_node = isinstance(coeffs, list) and coeffs and isinstance(coeffs[0], (list, tuple))
    out = []
    for i in range(cfg.problem.node_count):
        c = coeffs[i] if per_node else coeffs
        try:
            out.append(build_filter(spec.order(i), c))
        except ValidationError as exc:
            raise ValidationError(str(exc), "solver.filter_coeffs" + (f"[{i}]" if per_node else "")) from None
    return out


def measurement(cfg):
    """The noisy measurement ``t -> z + eps(t) + w(t)`` seen by the nodes."""
    z = cfg.problem.z
    base = measurement_signal(cfg.disturbance, z) if cfg.disturbance is not None else constant_signal(z)
    if cfg.solver.variant == "exact":
        base = constant_signal(z)
    noise = None
    if cfg.noise is not None and cfg.noise.rms > 0:
        noise = band_limited_noise(
            cfg.noise.rms, cfg.noise.interval, cfg.t_end, cfg.problem.node_count, cfg.noise.seed
        )
    return add_signals(base, noise)


def build_model(cfg):
    s = cfg.solver
    p, g = cfg.problem, cfg.graph
    signal = measurement(cfg)
    common = dict(kappa1=s.kappa1, kappa2=s.kappa2)
    if s.variant == "exact":
        return ExactSolver(p, g, signal=signal, **common)
    if s.variant == "none":
        return UncompensatedSolver(p, g, signal=signal, **common)
    if s.variant == "washout":
        return WashoutSolver(p, g, pole=s.washout_pole, signal=signal, **common)
    if s.variant == "known_freq":
        return KnownFrequencySolver.luenberger(
            p, g, cfg.disturbance, gains=s.observer_gains, poles=s.observer_poles, signal=signal, **common
        )
    kwargs = {}
    if s.max_transform_condition is not None:
        kwargs["max_transform_condition"] = s.max_transform_condition
    return AdaptiveSolver(
        p,
        g,
        _filters(cfg),
        learning_rate=np.asarray(s.learning_rate, dtype=float),
        normalization_weight=np.asarray(s.normalization_weight, dtype=float),
        signal=signal,
        sylvester_stride=s.sylvester_stride,
        alpha_hat_init=s.alpha_hat_init,
        **common,
        **kwargs,
    )


def segments(cfg):
    """``(t0, t1, compensation_on)`` pieces split at the toggle times."""
    out = []
    t, on = 0.0, True
    for t_switch, state in cfg.solver.toggles:
        if t_switch > t:
            out.append((t, t_switch, on))
        t, on = t_switch, state
    out.append((t, cfg.t_end, on))
    return out


class _Recorder:
    def __init__(self, model):
        self.model = model
        self.rows = {k: [] for k in ("t", "x", "v", "omega_hat", "e", "compensation")}

    def __call__(self, t, y):
        obs = self.model.observe(t, y)
        self.rows["t"].append(t)
        for key in ("x", "v", "omega_hat", "e", "compensation"):
            self.rows[key].append(np.array(obs[key], dtype=float))

    def trace(self, y_star, orders):
        r = self.rows
        if not r["t"]:
            return Trace.empty(self.model.N, self.model.m, orders, y_star)
        omega = np.array(r["omega_hat"]).reshape(len(r["t"]), -1)
        if omega.shape[1] == 0:
            omega = np.zeros((len(r["t"]), int(sum(orders))))
        return Trace(
            t=np.array(r["t"]),
            x=np.array(r["x"]),
            v=np.array(r["v"]),
            omega_hat=omega,
            e=np.array(r["e"]),
            compensation=np.array(r["compensation"]),
            y_star=y_star,
            orders=tuple(orders),
        )


def run_scenario(cfg, model=None):
    """Simulate ``cfg``; returns a :class:`Trace` whose ``summary`` holds the metrics.

    Raises ``AssumptionError``/``ValidationError`` before integrating and
    ``IntegrationError`` (with the failure time) on numerical blow-up.
    """
    spec_graph = spectrum(cfg.graph)
    cert = certify_gains(cfg.solver.kappa1, cfg.solver.kappa2, spec_graph, cfg.problem)
    if not cert.satisfied:
        log.warning(
            "%s: gains kappa1=%g kappa2=%g do not meet the sufficient bound (kappa2 >= %.4g); running anyway",
            cfg.name, cert.kappa1, cert.kappa2, cert.kappa2_bound,
        )
    if model is None:
        model = build_model(cfg)
    y_star = least_squares_oracle(cfg.problem)

    rng = np.random.default_rng(cfg.seed)
    y = rng.uniform(cfg.init_range[0], cfg.init_range[1], size=model.state_dim)
    if isinstance(model, AdaptiveSolver):
        model.reset()
        y[2 * model.nx + model.n_eta :] = model.alpha_hat_init

    orders = (
        [cfg.disturbance.order(i) for i in range(cfg.problem.node_count)]
        if cfg.solver.variant in ("known_freq", "adaptive")
        else []
    )
    rec = _Recorder(model)
    events = []
    for k, (t0, t1, on) in enumerate(segments(cfg)):
        if k > 0:
            events.append({"t": t0, "node": None, "kind": "compensation_on" if on else "compensation_off", "detail": ""})
        y = integrate(model.system(on), t0, t1, cfg.dt, y, sink=rec, decimation=cfg.decimation, record_start=k == 0)
    trace = rec.trace(y_star, orders)
    trace.events = sorted(events + list(model.events), key=lambda e: e["t"])
    trace.summary = summarize(cfg, trace, cert)
    return trace


def summarize(cfg, trace, cert=None):
    errs = trace.node_errors()
    first_switch = cfg.solver.toggles[0][0] if cfg.solver.toggles else cfg.t_end
    summary = {
        "name": cfg.name,
        "variant": cfg.solver.variant,
        "t_end": float(trace.t[-1]),
        "samples": len(trace),
        "y_star": trace.y_star.tolist(),
        "final_node_errors": errs[-1].tolist(),
        "final_error": float(errs[-1].max()),
        "dual_sum_drift": float(np.abs(trace.dual_sum() - trace.dual_sum()[0]).max()),
        "event_count": len(trace.events),
    }
    try:
        summary["decay_rate"] = fit_decay_rate(trace, window=(0.0, first_switch))
    except ValidationError:
        summary["decay_rate"] = None
    if trace.omega_hat.shape[1] and cfg.disturbance is not None:
        true = np.concatenate([cfg.disturbance.frequencies(i) for i in range(cfg.problem.node_count)])
        summary["omega_hat_final"] = trace.omega_hat[-1].tolist()
        summary["omega_errors"] = np.abs(trace.omega_hat[-1] - true).tolist()
    if cert is not None:
        summary["gain_certificate"] = {
            "satisfied": cert.satisfied,
            "kappa2_bound": cert.kappa2_bound,
            "lambda_lower": cert.lambda_lower,
            "lambda_upper": cert.lambda_upper,
        }
    return summary
