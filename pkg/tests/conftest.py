import pytest

from anchortree import enable_acceleration


@pytest.fixture(scope="session", autouse=True)
def _accelerated_keccak():
    # Best effort: the suite hashes a lot. Falls back to pure Python if
    # numba is absent; every test must pass either way.
    enable_acceleration()
