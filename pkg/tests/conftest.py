import pytest

# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[num])


@pytest.fixture
def report_criterion():
    def record(num: int, passed: bool, detail: str) -> None:
        line = f"criterion {num}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[num] = line
        print(line)

    return record
