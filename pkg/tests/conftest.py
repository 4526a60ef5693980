import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_x(rng):
    """Seeded 8x6 training matrix used by the solver/oracle tests."""
    return rng.standard_normal((8, 6))


@pytest.fixture(scope="session")
def dense_x():
    """Seeded dense 200x50 matrix for the full-rank identity checks."""
    return np.random.default_rng(42).standard_normal((200, 50))
