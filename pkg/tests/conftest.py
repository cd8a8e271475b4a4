import numpy as np
import pytest

from fastpivot import BanditInstance, StoppingInstance


@pytest.fixture
def two_state():
    return BanditInstance([[0.5, 0.5], [0.5, 0.5]], [1.0, 0.0], 0.5)


@pytest.fixture
def single_state():
    return BanditInstance([[1.0]], [7.0], 0.9)


def stopping(base, Q, nu=0.0):
    return StoppingInstance(base, np.asarray(Q, dtype=float), nu)
