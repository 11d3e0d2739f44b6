from .config import NoiseSpec, ScenarioConfig, SolverSettings, load_config, parse_config
from .run import build_model, run_scenario, summarize
from .scenarios import get_scenario, scenario_names, scenario_source
from .trace import Trace, export_csv, fit_decay_rate, read_csv

__all__ = [
    "NoiseSpec",
    "ScenarioConfig",
    "SolverSettings",
    "Trace",
    "build_model",
    "export_csv",
    "fit_decay_rate",
    "get_scenario",
    "load_config",
    "parse_config",
    "read_csv",
    "run_scenario",
    "scenario_names",
    "scenario_source",
    "summarize",
]
