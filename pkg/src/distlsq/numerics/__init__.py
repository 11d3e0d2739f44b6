from .integrate import LinearOdeSystem, OdeSystem, integrate, rk4_propagators, rk4_step
from .observability import (
    is_observable,
    observability_matrix,
    parallel_observability_check,
    parallel_pair,
    spectra_disjoint,
)
from .sylvester import SylvesterSolution, solve_sylvester, solve_sylvester_batch, sylvester_residual

__all__ = [
    "LinearOdeSystem",
    "OdeSystem",
    "SylvesterSolution",
    "integrate",
    "is_observable",
    "observability_matrix",
    "parallel_observability_check",
    "parallel_pair",
    "rk4_propagators",
    "rk4_step",
    "solve_sylvester",
    "solve_sylvester_batch",
    "spectra_disjoint",
    "sylvester_residual",
]
