"""Shared pytest hooks.

The acceptance tests register one verdict line per criterion; emitting
them from the terminal-summary hook keeps them visible in the ordinary
captured-output runs, not just under -s.
"""

ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance gate")
    for line in ACCEPTANCE_VERDICTS:
        terminalreporter.write_line(line)
