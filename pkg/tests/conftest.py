import numpy as np
import pytest

from nolb import graphs


@pytest.fixture(autouse=True, scope="session")
def validate_relaxation():
    """Exhaustively re-check the relaxation property on every call."""
    graphs.VALIDATE_RELAXATION = True
    yield
    graphs.VALIDATE_RELAXATION = False


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
