import pytest

from shimura_lab.fixtures import Fixtures


@pytest.fixture(scope="session")
def fx():
    return Fixtures()


@pytest.fixture(scope="session")
def F(fx):
    return fx.base_field()


@pytest.fixture(scope="session")
def D(fx):
    return fx.quaternion("D")
