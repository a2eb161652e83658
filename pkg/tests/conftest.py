import pytest

from helpers import build_grid


@pytest.fixture(scope="session")
def grid():
    """The exhaustive desk-scale configurations shared across test modules."""
    return build_grid()
