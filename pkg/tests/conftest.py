import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tracer_hartree.grid import Grid
from tracer_hartree.potentials import gaussian, gaussian_well, make_potentials

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid1d():
    return Grid(1, 128, 8 * np.pi)


@pytest.fixture(scope="session")
def pot1d(grid1d):
    return make_potentials(grid1d, gaussian_well(3.0, 1.5), gaussian(1.0, 1.0), 0.5)


@pytest.fixture(scope="session")
def lattice4():
    return Grid.lattice(4, 2 * np.pi)


@pytest.fixture(scope="session")
def latpot4(lattice4):
    return make_potentials(lattice4, gaussian_well(1.0, 1.0), gaussian(1.0, 1.0), 0.8)


def random_field(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
