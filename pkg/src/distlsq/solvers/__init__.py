from .adaptive import AdaptiveSolver, adaptive_rhs
from .base import PrimalDualCore
from .exact import ExactSolver, UncompensatedSolver, equilibrium, exact_rhs, undirected_rhs
from .known_freq import REFERENCE_GAINS, KnownFrequencySolver, NodeObserver, known_freq_rhs, luenberger_gain
from .washout import WashoutSolver, washout_attenuation, washout_rhs

__all__ = [
    "AdaptiveSolver",
    "ExactSolver",
    "KnownFrequencySolver",
    "NodeObserver",
    "PrimalDualCore",
    "REFERENCE_GAINS",
    "UncompensatedSolver",
    "WashoutSolver",
    "adaptive_rhs",
    "equilibrium",
    "exact_rhs",
    "known_freq_rhs",
    "luenberger_gain",
    "undirected_rhs",
    "washout_attenuation",
    "washout_rhs",
]
