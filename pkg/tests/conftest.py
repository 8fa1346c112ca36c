import numpy as np
import pytest

from ddchirp import (GridConfig, PreambleBank, build_root_set,
                     build_sensing_matrix)

PAPER_NU_MAX_HZ = 815.0
PAPER_TAU_MAX_S = 2.51e-6


@pytest.fixture(scope="session")
def paper_grid():
    """The reference grid: M=31, N=37, nu_p=30 kHz, Veh-A spreads."""
    return GridConfig(31, 37, 30e3, PAPER_TAU_MAX_S, PAPER_NU_MAX_HZ)


@pytest.fixture(scope="session")
def small_grid():
    return GridConfig(7, 9, 30e3)


@pytest.fixture(scope="session")
def roots_1024(paper_grid):
    return build_root_set(paper_grid, 1024)


@pytest.fixture(scope="session")
def bank_1024(roots_1024):
    return PreambleBank(roots_1024)


@pytest.fixture(scope="session")
def sensing_1024(roots_1024, paper_grid):
    return build_sensing_matrix(roots_1024, paper_grid)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
