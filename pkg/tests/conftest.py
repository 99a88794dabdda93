import pytest

from mhd2b.spectral import GridSpec


@pytest.fixture
def grid64():
    return GridSpec(64)


@pytest.fixture
def grid32():
    return GridSpec(32)
