"""Shared pytest hooks: the acceptance checklist summary."""

_acceptance_lines = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance checklist")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
