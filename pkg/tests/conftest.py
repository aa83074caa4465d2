"""Collects the acceptance scorecard so it survives output capture."""

import pytest

_SCORECARD: list[str] = []


@pytest.fixture
def scorecard():
    return _SCORECARD


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _SCORECARD:
        terminalreporter.section("acceptance criteria")
        for line in _SCORECARD:
            terminalreporter.write_line(line)
