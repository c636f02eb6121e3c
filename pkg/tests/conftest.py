import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from colwave.mollify import build_mollifier

settings.register_profile("colwave", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("colwave")


@pytest.fixture(scope="session")
def phi():
    return build_mollifier(1.0, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, collected by test_acceptance."""
    try:
        from test_acceptance import CRITERIA_LINES
    except ImportError:
        return
    if not CRITERIA_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA_LINES, key=lambda k: int(k)):
        terminalreporter.write_line(CRITERIA_LINES[key])
