"""Shared fixtures: working precision and the reference two-fold system."""

import mpmath
import pytest

from canard.pws import reference_system
from canard.regularization import ArctanRegularization


@pytest.fixture(autouse=True)
def precision_120():
    """Every test runs at 120 significant digits unless it says otherwise."""
    with mpmath.workdps(120):
        yield


@pytest.fixture(scope="session")
def two_fold():
    return reference_system()


@pytest.fixture(scope="session")
def arctan():
    return ArctanRegularization()


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion when the acceptance suite ran."""
    try:
        from tests.test_acceptance import DESCRIPTIONS, RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, text in DESCRIPTIONS.items():
        parts = [r for r in RESULTS if r[0] == criterion]
        if not parts:
            continue
        verdict = "PASS" if all(p[2] for p in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {criterion} {verdict}: {text}")
        for _, part, passed, detail in parts:
            terminalreporter.write_line(f"    {'ok  ' if passed else 'FAIL'} {part}: {detail}")
