"""Shared pytest hooks: surface the acceptance lines in the run summary.

The acceptance tests record one pass/fail line per criterion; printing them
from a terminal-summary hook keeps them visible without -s.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
