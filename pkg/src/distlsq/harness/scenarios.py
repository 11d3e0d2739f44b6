"""Builtin scenarios on the four-node reference instance.

Each node ``i`` (1-indexed) carries one unit-amplitude, zero-phase tone at
``0.5 i`` rad/s.  Initial states are drawn uniformly from ``[-1, 1]`` with
seed 0; traces are decimated by 10 at ``dt = 1e-3``.
"""

from __future__ import annotations

import copy

from ..graph import four_node_digraph
from ..problem import REFERENCE_H, REFERENCE_Z
from ..solvers.known_freq import REFERENCE_GAINS
from .config import parse_config

FREQUENCIES = (0.5, 1.0, 1.5, 2.0)


def _base(name, t_end):
    g = four_node_digraph()
    return {
        "name": name,
        "problem": {"H": REFERENCE_H.tolist(), "z": REFERENCE_Z.tolist()},
        "graph": {"nodes": g.node_count, "edges": [list(e) for e in g.edges()]},
        "disturbance": {"nodes": [[[1.0, w, 0.0]] for w in FREQUENCIES]},
        "simulation": {"t_end": t_end, "dt": 1e-3, "decimation": 10, "seed": 0, "init_range": [-1.0, 1.0]},
    }


def _exact():
    raw = _base("exact", 100.0)
    del raw["disturbance"]
    raw["solver"] = {"variant": "exact", "kappa1": 1.0, "kappa2": 1.0}
    return raw


def _fig2():
    raw = _base("fig2", 300.0)
    raw["solver"] = {
        "variant": "known_freq",
        "observer_gains": [list(k) for k in REFERENCE_GAINS],
        "toggles": [[150.0, "off"], [200.0, "on"]],
    }
    return raw


def _fig3_fig4():
    raw = _base("fig3_fig4", 200.0)
    raw["solver"] = {
        "variant": "adaptive",
        "filter_coeffs": [8.0, 12.0, 6.0],
        "learning_rate": 30.0,
        "normalization_weight": 1.0,
    }
    return raw


def _fig5():
    raw = _base("fig5", 200.0)
    raw["solver"] = {"variant": "washout", "washout_pole": 0.4}
    return raw


def _uncompensated():
    raw = _base("uncompensated", 200.0)
    raw["solver"] = {"variant": "none"}
    return raw


_BUILDERS = {
    "exact": (_exact, "primal-dual solver, undisturbed measurements"),
    "fig2": (_fig2, "known-frequency observers, compensation off over 150-200 s"),
    "fig3_fig4": (_fig3_fig4, "adaptive frequency identification, filter (8, 12, 6)"),
    "fig5": (_fig5, "washout filter baseline, d = 0.4"),
    "uncompensated": (_uncompensated, "disturbed measurements fed straight to the solver"),
}


def scenario_names():
    return list(_BUILDERS)


def describe(name):
    return _BUILDERS[name][1]


def scenario_source(name):
    """Raw mapping for a builtin scenario (a valid config file body)."""
    if name not in _BUILDERS:
        raise KeyError(f"unknown scenario {name!r}; available: {', '.join(_BUILDERS)}")
    return copy.deepcopy(_BUILDERS[name][0]())


def get_scenario(name, **overrides):
    """Parsed :class:`ScenarioConfig`; ``overrides`` go to ``simulation`` (``seed``, ``dt`` ...)."""
    cfg = parse_config(scenario_source(name))
    return cfg.replace(**overrides) if overrides else cfg
