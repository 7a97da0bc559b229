import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Collects one summary line per acceptance criterion."""

    def _record(criterion: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
