import pytest

from robustuc.backends import ClarabelConicBackend, HighsMilpBackend
from robustuc.cases import three_bus_case, two_bus_case
from robustuc.network import ensure_reactive_support


@pytest.fixture(scope="session")
def conic():
    return ClarabelConicBackend()


@pytest.fixture(scope="session")
def milp():
    return HighsMilpBackend()


@pytest.fixture(scope="session")
def two_bus():
    case, ts = two_bus_case()
    return ensure_reactive_support(case), ts


@pytest.fixture(scope="session")
def three_bus():
    case, ts = three_bus_case()
    return ensure_reactive_support(case), ts
