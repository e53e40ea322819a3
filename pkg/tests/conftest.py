"""Shared pytest plumbing.

Acceptance tests register one human-readable pass/fail line each; the
terminal-summary hook replays them at the end of the run so they stay
visible even though pytest captures stdout.
"""

_acceptance_lines: list[str] = []


def record_acceptance(line: str) -> None:
    print(line)
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
