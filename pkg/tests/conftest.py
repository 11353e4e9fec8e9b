import pytest

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line, then assert it."""
    def record(number: int, title: str, passed: bool, detail: str):
        ACCEPTANCE_LINES[number] = f"{'PASS' if passed else 'FAIL'}  [{number:2d}] {title}: {detail}"
        assert passed, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
