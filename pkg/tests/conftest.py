import math

import pytest

from travgraph.params import make_params

ACCEPTANCE_LINES = []


@pytest.fixture
def p45():
    return make_params(math.pi / 4, 1.0)


@pytest.fixture
def b_one():
    """Parameters with b = c0 cos(alpha) = 1."""
    return make_params(math.pi / 4, math.sqrt(2.0))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
