import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# One fixed seed for every stochastic test; never tuned per test.
SEED = 20240917

ACCEPTANCE_LINES: list = []


@pytest.fixture
def seed():
    return SEED


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
