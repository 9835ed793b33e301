import os
import sys

import numpy as np
import pytest

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
ROOT_DIR = os.path.dirname(TESTS_DIR)

sys.path.insert(0, ROOT_DIR)

from runtrace import FileStorage  # noqa E402
from trimlab.conv import ConvShape, FeatureMap, Kernel  # noqa E402


@pytest.fixture
def storage(tmpdir):
    return FileStorage(os.path.join(tmpdir, "storage"))


@pytest.fixture
def shape5():
    """The 5x5 ifmap / 3x3 kernel walk-through configuration."""
    return ConvShape.square(5, 3)


@pytest.fixture
def ramp_ifmap():
    return FeatureMap.arange(5, 5)


@pytest.fixture
def ramp_kernel():
    return Kernel.arange(3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
