import numpy as np
import pytest

from fockop import SpaceParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def gauss1():
    return SpaceParams(1, 1.0)


# (d, m, s) combinations used across modules
SPACES = [(1, 1.0, 0.0), (1, 1.5, 0.5), (1, 2.0, 0.0), (2, 1.0, 0.0), (2, 2.0, 0.5), (2, 1.5, 1.0)]


def space_id(t):
    return "d{}-m{}-s{}".format(*t)
