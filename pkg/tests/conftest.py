import numpy as np
import pytest

from starkres.potential import double_bump, square_barrier, square_well, zero_potential


@pytest.fixture(scope="session")
def well():
    return square_well(-2.0, 1.0)


@pytest.fixture(scope="session")
def barrier():
    return square_barrier(2.0, 1.0)


@pytest.fixture(scope="session")
def bump():
    return double_bump(1.0, 0.5, 1.0, V1=2.0)


@pytest.fixture(scope="session")
def free():
    return zero_potential()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
