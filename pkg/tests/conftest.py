import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from vagueregion.model import GeoRecord, validate_dataset  # noqa: E402


def make_dataset(coords, times=None, text="x"):
    times = list(range(len(coords))) if times is None else times
    return validate_dataset(GeoRecord(la, lo, t, text) for (la, lo), t in zip(coords, times))


@pytest.fixture
def dataset_factory():
    return make_dataset


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
