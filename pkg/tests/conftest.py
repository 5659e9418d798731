import numpy as np
import pytest

from oscint.groups import SU2, torus
from oscint.group_domain import build_grid


@pytest.fixture(scope="session")
def t1_grid():
    return build_grid(torus(1), 64)


@pytest.fixture(scope="session")
def t1_grid_fine():
    return build_grid(torus(1), 256)


@pytest.fixture(scope="session")
def t2_grid():
    return build_grid(torus(2), 16)


@pytest.fixture(scope="session")
def su2_grid():
    return build_grid(SU2, 6)


@pytest.fixture(scope="session")
def su2_grid_16():
    return build_grid(SU2, 16)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)


def random_unit_quaternions(rng, n):
    q = rng.normal(size=(n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)
