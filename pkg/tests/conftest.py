import pytest

from helpers import SCALED, reeb_of, sampled


@pytest.fixture(scope="session")
def sinsin16():
    return sampled("sinsin", 16), reeb_of("sinsin", 16)


@pytest.fixture(scope="session")
def scaled32():
    return sampled(SCALED, 32), reeb_of(SCALED, 32)
