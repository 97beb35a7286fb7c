import pytest

from corpus import ACCEPTANCE
from gbsfix.graph import bs_graph, derive_presentation


@pytest.fixture
def bs23():
    return derive_presentation(bs_graph(2, 3))


@pytest.fixture
def bs24():
    return derive_presentation(bs_graph(2, 4))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, status = ACCEPTANCE[n]
        verdict, _, reason = status.partition(": ")
        line = f"criterion {n:2d} [{verdict}] {title}"
        terminalreporter.write_line(line + (f" -- {reason}" if reason else ""))
