import numpy as np
import pytest

from ssrduality.cli import sweep_rows

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sweep_21():
    """The default 21-point sweep over [0, 1], computed once per session."""
    return sweep_rows(np.linspace(0.0, 1.0, 21))


@pytest.fixture
def record_acceptance():
    def record(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
