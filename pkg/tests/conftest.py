import numpy as np
import pytest

from cliffsde import TimeGrid, make_space


@pytest.fixture(scope="session")
def space4():
    """Four fermion increments on [0, 1]: dim 4, exactly dyadic deltas."""
    return make_space(TimeGrid.uniform(0.0, 1.0, 4))


@pytest.fixture(scope="session")
def space8():
    return make_space(TimeGrid.uniform(0.0, 1.0, 8))


@pytest.fixture(scope="session")
def pair_space4():
    """Four pair increments on [0, 1]: 8 generators, dim 16."""
    return make_space(TimeGrid.uniform(0.0, 1.0, 4), layout="pair")


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
