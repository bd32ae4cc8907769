import numpy as np
import pytest

from vdselect.ambient import AmbientSpace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_space():
    return AmbientSpace(12)
