import numpy as np
import pytest

from reskit.geometry import UnitDisk, Rectangle


@pytest.fixture
def disk():
    return UnitDisk()


@pytest.fixture
def square():
    return Rectangle(-1.0, -1.0, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
