import numpy as np
import pytest

from revlab import PiecewiseFn


@pytest.fixture
def step_half():
    """1 on [0, 1/2), 0 on [1/2, 1]."""
    return PiecewiseFn.step([0.0, 0.5, 1.0], [1.0, 0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
