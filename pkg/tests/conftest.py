import numpy as np
import pytest

from condgate.gates import fifty_fifty_network
from condgate.netcompile import ModePartition

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fifty():
    return fifty_fifty_network(), ModePartition(2, 1)
