"""Distributed continuous-time least-squares solvers with sinusoidal disturbance rejection."""

from .disturbance import DisturbanceSpec, Sinusoid
from .estimator import DistributedLeastSquares
from .exceptions import (
    AssumptionError,
    DimensionError,
    IntegrationError,
    NotHurwitzError,
    ValidationError,
)
from .graph import Digraph, four_node_digraph, spectrum
from .harness import get_scenario, run_scenario
from .problem import LsqProblem, certify_gains, least_squares_oracle, reference_problem

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "DimensionError",
    "Digraph",
    "DistributedLeastSquares",
    "DisturbanceSpec",
    "IntegrationError",
    "LsqProblem",
    "NotHurwitzError",
    "Sinusoid",
    "ValidationError",
    "certify_gains",
    "four_node_digraph",
    "get_scenario",
    "least_squares_oracle",
    "reference_problem",
    "run_scenario",
    "spectrum",
]
