import pytest

from trident.forms import parse_form


@pytest.fixture(scope="session")
def cubic_minus():
    return parse_form("x1^3+x2^3-x3^3")


@pytest.fixture(scope="session")
def cubic_plus():
    return parse_form("x1^3+x2^3+x3^3")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
