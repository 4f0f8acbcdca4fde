"""Shared pytest wiring: the acceptance suite records one verdict line per
criterion, echoed in the terminal summary regardless of capture settings."""

VERDICTS: list = []


def record_verdict(line: str) -> None:
    VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
