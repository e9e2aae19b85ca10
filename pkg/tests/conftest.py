from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repo")

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def golden():
    def read(name: str) -> str:
        return (GOLDEN / name).read_text()
    return read


CRITERIA_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
