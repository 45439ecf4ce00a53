import numpy as np
import pytest

from ecfgof.rng import SeedSpec


@pytest.fixture
def stream():
    return SeedSpec(12345).stream()


def rng_for(*path):
    return SeedSpec(777, path).stream()


def random_spd(stream, p):
    a = stream.standard_normal((p, p))
    return a @ a.T + p * np.eye(p)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
