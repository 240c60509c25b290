import numpy as np
import pytest

from kj_sle.core_config import SleConfig
from kj_sle.reductions.sat import CnfFormula
from kj_sle.reductions.tsp import DistanceMatrix


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-sized runs (minutes)")


@pytest.fixture
def config():
    return SleConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def xor_formula():
    """(x1 or x2) and (not x1 or not x2): satisfied by j = 1 and j = 2."""
    return CnfFormula.from_clauses(2, [[1, 2], [-1, -2]])


@pytest.fixture
def contradiction():
    return CnfFormula.from_clauses(1, [[1], [-1]])


@pytest.fixture
def all_ones_matrix():
    return DistanceMatrix.from_rows([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
