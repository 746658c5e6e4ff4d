import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from rydpol.params import SystemParams  # noqa: E402


@pytest.fixture
def far_detuned():
    """Attractive far-detuned system (g >> Omega, Omega << delta)."""
    return SystemParams(g=10.0, omega=0.05, delta=1.0, c=1.0, c6=-1.0)


@pytest.fixture
def unit_params():
    return SystemParams(g=1.0, omega=1.0, delta=1.0, c=1.0, c6=1.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
