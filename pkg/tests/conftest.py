import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pstchain import ChainSpec, design  # noqa: E402

R3 = math.sqrt(3.0) / 2.0


@pytest.fixture
def rng():
    return np.random.default_rng(20260416)


@pytest.fixture
def m1_chain():
    return ChainSpec([2.5, 2.5, 2.5, 2.5], [R3, 1.0, R3])


@pytest.fixture
def m1_design():
    return design([1, 2, 3, 4])


@pytest.fixture
def odd5_design():
    return design([5.0, 2.0, 1.0, 0.0, -3.0])
