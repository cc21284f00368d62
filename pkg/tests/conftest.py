"""Shared test plumbing: collect acceptance verdict lines and print them
in the terminal summary (fd-level capture would otherwise swallow them)."""

verdict_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if verdict_lines:
        terminalreporter.section("acceptance verdicts")
        for line in verdict_lines:
            terminalreporter.write_line(line)
