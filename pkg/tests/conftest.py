import pytest

from oracles import ACCEPTANCE_LINES
from textvote.corpus import DatasetSpec


@pytest.fixture
def abc_spec():
    return DatasetSpec(("tech", "sports", "finance"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
