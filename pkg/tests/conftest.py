import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

RESULTS: list[tuple[int, str, bool, str]] = []


class Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title

    def report(self, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {self.number:>2}: {self.title}" + (f" ({detail})" if detail else "")
        RESULTS.append((self.number, self.title, ok, line))
        print(line)
        assert ok, line


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for *_, line in sorted(RESULTS):
        terminalreporter.write_line(line)
