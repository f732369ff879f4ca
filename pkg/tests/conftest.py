from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
TABLES = FIXTURES / "golden_tables"

_acceptance_lines = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion; printed in the summary."""
    def record(number, title, checks):
        failed = [name for name, ok in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number:2d} {status}: {title}"
        if failed:
            line += " (failed: " + "; ".join(failed) + ")"
        _acceptance_lines[number] = line
        print(line)
        return not failed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance_lines):
        terminalreporter.write_line(_acceptance_lines[number])
