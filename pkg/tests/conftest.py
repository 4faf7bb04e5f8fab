import numpy as np
import pytest

from zenodec.lattice import Grid1D, gaussian_density_matrix


@pytest.fixture
def grid():
    return Grid1D(256, 0.02)


@pytest.fixture
def rho_in(grid):
    """The reference initial state: pure Gaussian, sigma = 0.1."""
    return gaussian_density_matrix(grid, 0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def steady_state():
    """Zeno quasi-mode prepared with the environment off (shared; expensive)."""
    from zenodec.propagators import QBMParams
    from zenodec.runner import ExperimentConfig, prepare_steady_state

    return prepare_steady_state(ExperimentConfig(qbm=QBMParams(D=0.0)))


@pytest.fixture(scope="session")
def decay_mode_session():
    """Dimensionless classical decay mode (shared; expensive)."""
    from zenodec.classical import find_steady_mode

    return find_steady_mode()
