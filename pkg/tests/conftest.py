from fractions import Fraction

import pytest

from groupcut import PeriodicPWL

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def bump_value(f: PeriodicPWL, index: int, amount: Fraction) -> PeriodicPWL:
    """Copy of f with one breakpoint value shifted by `amount`."""
    vals = list(f.values)
    vals[index] += amount
    return PeriodicPWL(f.breakpoints, vals)


@pytest.fixture
def F():
    return Fraction
