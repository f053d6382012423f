import pytest

_acceptance_lines: list[str] = []


@pytest.fixture
def report():
    """Print one PASS/FAIL line for an acceptance criterion and keep it for the summary."""

    def emit(number, title, passed, detail):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
        print(line)
        _acceptance_lines.append(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
