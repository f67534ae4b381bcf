import math

import pytest
from hypothesis import HealthCheck, settings

from crosswind.path import PathParams
from crosswind.traction import AeroParams, derive_constants
from crosswind.wind import ShearParams

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

THETA_STAR = math.atan(math.sqrt(0.1))


@pytest.fixture(scope="session")
def const():
    return derive_constants(AeroParams())


@pytest.fixture(scope="session")
def shear():
    return ShearParams()


@pytest.fixture
def small_path():
    return PathParams(0.0, THETA_STAR, 0.3, 0.1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
