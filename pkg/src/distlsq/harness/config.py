"""Scenario configuration: schema, parsing and validation.

A scenario file is YAML (JSON is accepted too)::

    name: my-run
    problem:
      H: [[0.0479, 0.0176], [0.7514, 0.0724], ...]   # one row per node
      z: [10, 20, 30, 40]
    graph:
      nodes: 4
      edges: [[1, 3, 1.0], [3, 2], ...]     # src dst [weight], 1-indexed
      # or: adjacency: [[0, 1, 0, 0], ...]  # a_ij > 0: node i hears node j
    disturbance:                            # optional
      nodes:                                # per node: [amplitude, frequency, phase]
        - [[1.0, 0.5, 0.0]]
        - [[1.0, 1.0, 0.0]]
    solver:
      variant: adaptive                     # exact | none | known_freq | adaptive | washout
      kappa1: 1.0
      kappa2: 1.0
      observer_gains: [[24, -18, 21.5], ...]   # known_freq; or observer_poles
      filter_coeffs: [8, 12, 6]             # adaptive; shared or one list per node
      learning_rate: 30                     # scalar or per node
      normalization_weight: 1.0             # 0 selects the plain gradient rule
      alpha_hat_init: null
      sylvester_stride: 1
      washout_pole: 0.4
      toggles: [[150, off], [200, on]]      # compensation switching
    noise:                                  # optional unstructured perturbation
      rms: 0.1
      interval: 0.05
      seed: 7
    simulation:
      t_end: 200
      dt: 0.001
      decimation: 10
      seed: 0
      init_range: [-1, 1]
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from ..disturbance import DisturbanceSpec, Sinusoid
from ..exceptions import ValidationError
from ..graph import Digraph
from ..problem import LsqProblem

VARIANTS = ("exact", "none", "known_freq", "adaptive", "washout")
_ON = {"on": True, "off": False, True: True, False: False, 1: True, 0: False}


@dataclass
class NoiseSpec:
    rms: float
    interval: float = 0.05
    seed: int = 0


@dataclass
class SolverSettings:
    variant: str = "exact"
    kappa1: float = 1.0
    kappa2: float = 1.0
    observer_gains: Optional[list] = None
    observer_poles: Optional[list] = None
    filter_coeffs: Any = None
    learning_rate: Any = 30.0
    normalization_weight: Any = 1.0
    alpha_hat_init: Optional[list] = None
    sylvester_stride: int = 1
    max_transform_condition: Optional[float] = None
    washout_pole: float = 0.4
    toggles: list = field(default_factory=list)


@dataclass
class ScenarioConfig:
    name: str
    problem: LsqProblem
    graph: Digraph
    solver: SolverSettings
    disturbance: Optional[DisturbanceSpec] = None
    noise: Optional[NoiseSpec] = None
    t_end: float = 100.0
    dt: float = 1e-3
    decimation: int = 10
    seed: int = 0
    init_range: tuple = (-1.0, 1.0)
    source: dict = field(default_factory=dict, repr=False)

    def replace(self, **changes):
        """Copy with ``simulation`` fields overridden (``seed``, ``dt``, ``t_end`` ...)."""
        raw = copy.deepcopy(self.source)
        sim = raw.setdefault("simulation", {})
        for key, value in changes.items():
            if value is None:
                continue
            if key == "name":
                raw["name"] = value
            else:
                sim[key] = value
        return parse_config(raw)


def _require(d, key, path):
    if not isinstance(d, dict) or key not in d:
        raise ValidationError("missing required field", f"{path}.{key}" if path else key)
    return d[key]


def _number(value, path, positive=False, nonnegative=False):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"expected a number, got {value!r}", path) from None
    if not np.isfinite(out):
        raise ValidationError("must be finite", path)
    if positive and not out > 0:
        raise ValidationError(f"must be positive, got {out}", path)
    if nonnegative and out < 0:
        raise ValidationError(f"must be nonnegative, got {out}", path)
    return out


def _matrix(value, path):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("expected a numeric matrix", path) from None
    return arr


def _parse_problem(raw):
    H = _matrix(_require(raw, "H", "problem"), "problem.H")
    z = _matrix(_require(raw, "z", "problem"), "problem.z")
    if H.ndim != 2:
        raise ValidationError("must be a list of rows", "problem.H")
    try:
        return LsqProblem(H, z)
    except ValidationError as exc:
        raise ValidationError(str(exc), "problem") from None


def _parse_graph(raw, n_rows):
    n = int(raw.get("nodes", n_rows))
    if "adjacency" in raw:
        A = _matrix(raw["adjacency"], "graph.adjacency")
        try:
            g = Digraph(A)
        except ValidationError as exc:
            raise ValidationError(str(exc), "graph.adjacency") from None
    elif "edges" in raw:
        edges = raw["edges"]
        if not isinstance(edges, list):
            raise ValidationError("must be a list of [src, dst, weight]", "graph.edges")
        for k, e in enumerate(edges):
            if not isinstance(e, (list, tuple)) or len(e) not in (2, 3):
                raise ValidationError("edge must be [src, dst] or [src, dst, weight]", f"graph.edges[{k}]")
            if len(e) == 3:
                _number(e[2], f"graph.edges[{k}][2]", positive=True)
        try:
            g = Digraph.from_edges(edges, node_count=n)
        except ValidationError as exc:
            raise ValidationError(str(exc).split(": ", 1)[-1], f"graph.{exc.field}" if exc.field else "graph") from None
    else:
        raise ValidationError("needs 'edges' or 'adjacency'", "graph")
    if g.node_count != n_rows:
        raise ValidationError(f"graph has {g.node_count} nodes but H has {n_rows} rows", "graph")
    return g


def _parse_disturbance(raw, n_rows):
    nodes = _require(raw, "nodes", "disturbance")
    if not isinstance(nodes, list) or len(nodes) != n_rows:
        raise ValidationError(f"expected one entry per node ({n_rows})", "disturbance.nodes")
    parsed = []
    for i, node in enumerate(nodes):
        sins = []
        for j, trip in enumerate(node or []):
            path = f"disturbance.nodes[{i}][{j}]"
            if not isinstance(trip, (list, tuple)) or len(trip) not in (2, 3):
                raise ValidationError("expected [amplitude, frequency, phase]", path)
            amp = _number(trip[0], path + "[0]")
            freq = _number(trip[1], path + "[1]", positive=True)
            phase = _number(trip[2], path + "[2]") if len(trip) == 3 else 0.0
            sins.append(Sinusoid(amp, freq, phase))
        parsed.append(tuple(sins))
    return DisturbanceSpec(tuple(parsed))


def _parse_toggles(raw):
    out = []
    last = -np.inf
    for k, item in enumerate(raw or []):
        path = f"solver.toggles[{k}]"
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ValidationError("expected [time, on|off]", path)
        t = _number(item[0], path + "[0]", nonnegative=True)
        state = item[1].lower() if isinstance(item[1], str) else item[1]
        if state not in _ON:
            raise ValidationError(f"expected 'on' or 'off', got {item[1]!r}", path + "[1]")
        if not t > last:
            raise ValidationError("toggle times must be strictly increasing", path)
        last = t
        out.append((t, _ON[state]))
    return out


def _parse_solver(raw, n_rows):
    variant = raw.get("variant", "exact")
    if variant not in VARIANTS:
        raise ValidationError(f"unknown variant {variant!r}; expected one of {VARIANTS}", "solver.variant")
    s = SolverSettings(variant=variant)
    s.kappa1 = _number(raw.get("kappa1", 1.0), "solver.kappa1", positive=True)
    s.kappa2 = _number(raw.get("kappa2", 1.0), "solver.kappa2", positive=True)
    s.observer_gains = raw.get("observer_gains")
    if s.observer_gains is not None and len(s.observer_gains) != n_rows:
        raise ValidationError(f"expected one gain vector per node ({n_rows})", "solver.observer_gains")
    s.observer_poles = raw.get("observer_poles")
    s.filter_coeffs = raw.get("filter_coeffs", [8.0, 12.0, 6.0])
    s.learning_rate = raw.get("learning_rate", 30.0)
    s.normalization_weight = raw.get("normalization_weight", 1.0)
    for key in ("learning_rate", "normalization_weight"):
        val = getattr(s, key)
        vals = val if isinstance(val, list) else [val]
        for k, v in enumerate(vals):
            _number(v, f"solver.{key}" + (f"[{k}]" if isinstance(val, list) else ""),
                    positive=key == "learning_rate", nonnegative=True)
    s.alpha_hat_init = raw.get("alpha_hat_init")
    s.sylvester_stride = int(raw.get("sylvester_stride", 1))
    if s.sylvester_stride < 1:
        raise ValidationError("must be >= 1", "solver.sylvester_stride")
    if raw.get("max_transform_condition") is not None:
        s.max_transform_condition = _number(raw["max_transform_condition"], "solver.max_transform_condition", positive=True)
    s.washout_pole = _number(raw.get("washout_pole", 0.4), "solver.washout_pole", positive=True)
    s.toggles = _parse_toggles(raw.get("toggles"))
    return s


def parse_config(raw):
    """Build a :class:`ScenarioConfig` from a plain mapping."""
    if not isinstance(raw, dict):
        raise ValidationError("config must be a mapping")
    problem = _parse_problem(_require(raw, "problem", ""))
    n = problem.node_count
    graph = _parse_graph(_require(raw, "graph", ""), n)
    solver = _parse_solver(raw.get("solver", {}), n)
    disturbance = _parse_disturbance(raw["disturbance"], n) if raw.get("disturbance") else None
    if solver.variant in ("known_freq", "adaptive", "washout", "none") and disturbance is None:
        disturbance = DisturbanceSpec(tuple(() for _ in range(n)))
    noise = None
    if raw.get("noise"):
        nz = raw["noise"]
        noise = NoiseSpec(
            rms=_number(_require(nz, "rms", "noise"), "noise.rms", nonnegative=True),
            interval=_number(nz.get("interval", 0.05), "noise.interval", positive=True),
            seed=int(nz.get("seed", 0)),
        )
    sim = raw.get("simulation", {})
    dt = _number(sim.get("dt", 1e-3), "simulation.dt", positive=True)
    t_end = _number(sim.get("t_end", 100.0), "simulation.t_end", positive=True)
    decimation = int(sim.get("decimation", 10))
    if decimation < 1:
        raise ValidationError("must be >= 1", "simulation.decimation")
    init_range = tuple(sim.get("init_range", (-1.0, 1.0)))
    if len(init_range) != 2 or not init_range[0] < init_range[1]:
        raise ValidationError("expected [low, high] with low < high", "simulation.init_range")
    for k, (t, _) in enumerate(solver.toggles):
        if t >= t_end:
            raise ValidationError("toggle time beyond t_end", f"solver.toggles[{k}]")
    return ScenarioConfig(
        name=str(raw.get("name", "scenario")),
        problem=problem,
        graph=graph,
        solver=solver,
        disturbance=disturbance,
        noise=noise,
        t_end=t_end,
        dt=dt,
        decimation=decimation,
        seed=int(sim.get("seed", 0)),
        init_range=(float(init_range[0]), float(init_range[1])),
        source=copy.deepcopy(raw),
    )


def load_config(path):
    """Read a YAML or JSON scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}", str(path)) from None
    try:
        raw = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (yaml.YAMLError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot parse config: {exc}", str(path)) from None
    return parse_config(raw)
