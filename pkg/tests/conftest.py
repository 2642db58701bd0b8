import os

import pytest
from hypothesis import HealthCheck, settings

from hubogas.problems import GcpInstance, TspInstance

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def triangle():
    return GcpInstance(3, ((0, 1), (1, 2), (0, 2)), 2)


@pytest.fixture
def triangle3():
    return GcpInstance(3, ((0, 1), (1, 2), (0, 2)), 3)


@pytest.fixture
def tsp4():
    return TspInstance(((0, 1, 2, 1), (1, 0, 1, 2), (2, 1, 0, 1), (1, 2, 1, 0)))
