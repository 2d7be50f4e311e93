import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lapcert import GaussHermiteEngine, builtin_model, find_map, taylor_misfit


@pytest.fixture(scope="session")
def gh96():
    return GaussHermiteEngine(order=96)


@pytest.fixture(scope="session")
def gh48():
    return GaussHermiteEngine(order=48)


@pytest.fixture(scope="session", params=[-2.0, 2.0], ids=["y_neg2", "y_pos2"])
def exp1d_case(request):
    """(problem, mode result, misfit surrogate) for the 1D exponential model."""
    problem = builtin_model("exp1d", y=request.param)
    result = find_map(problem)
    return problem, result, taylor_misfit(problem, result)


@pytest.fixture(scope="session")
def quad2d_case():
    problem = builtin_model("quad2d")
    result = find_map(problem)
    return problem, result, taylor_misfit(problem, result)


@pytest.fixture(scope="session")
def linear_case():
    problem = builtin_model("linear", seed=3)
    result = find_map(problem)
    return problem, result, taylor_misfit(problem, result)
