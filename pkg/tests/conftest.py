"""Shared test plumbing: collects one summary line per acceptance criterion
and prints them after the run."""

CRITERION_LINES = []


def record_criterion(line: str):
    CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria", sep="-")
    for line in sorted(CRITERION_LINES):
        terminalreporter.line(line)
