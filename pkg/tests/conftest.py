import sys

import numpy as np
import pytest

from distlsq.graph import four_node_digraph, spectrum
from distlsq.problem import least_squares_oracle, reference_problem

from _runs import cached_run


@pytest.fixture(scope="session")
def problem():
    return reference_problem()


@pytest.fixture(scope="session")
def graph():
    return four_node_digraph()


@pytest.fixture(scope="session")
def graph_spectrum(graph):
    return spectrum(graph)


@pytest.fixture(scope="session")
def y_star(problem):
    return least_squares_oracle(problem)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def scenario_trace():
    """Long builtin runs are shared by every test in the session."""
    return cached_run


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(module.RESULTS.items()):
        terminalreporter.write_line(line)
