import numpy as np
import pytest
from schrosym.spectral import PhysParams, SpectralGrid


@pytest.fixture
def phys():
    return PhysParams(1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid1d(phys):
    return SpectralGrid(1, 256, 20.0, phys)


@pytest.fixture
def grid2d(phys):
    return SpectralGrid(2, 64, 12.0, phys)


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: full-size asymptotic runs; deselect with -m "not slow"')
