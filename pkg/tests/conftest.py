import warnings

import pytest

from trimode.rwa import EliminationWarning

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE = {}


def record(number, title, ok, detail):
    ACCEPTANCE[number] = (title, bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}: {detail}")


@pytest.fixture(autouse=True)
def _quiet_elimination():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EliminationWarning)
        yield
