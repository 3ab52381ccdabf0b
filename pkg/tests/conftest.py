import numpy as np
import pytest

from chi2spectral import conversion
from chi2spectral.spectral import BASELINE_PROFILE, BASELINE_SIGMA

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def optimum():
    """EPM profile and special-condition crystal for the baseline parameters."""
    return conversion.optimal_config(BASELINE_PROFILE, BASELINE_SIGMA)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
