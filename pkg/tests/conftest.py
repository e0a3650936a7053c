import numpy as np
import pytest

from slq.coeffs import CoefficientSet

from _helpers import tags


@pytest.fixture
def free():
    return CoefficientSet.from_strings("1", growth=tags())


@pytest.fixture
def delta():
    return CoefficientSet.from_strings("1", jumps=((0.5, 10.0),), growth=tags())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
