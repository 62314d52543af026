import pytest

from qphase.grid import GridSpec, make_grid


@pytest.fixture(scope="session")
def grid():
    return make_grid(GridSpec())


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(GridSpec(nx=64, npts=64, x_half=6.0))
