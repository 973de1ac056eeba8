import pytest


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def report(request):
    """Record one pass/fail line for an acceptance criterion."""
    def record(label, passed, detail=""):
        line = f"{label:<4} {'PASS' if passed else 'FAIL'}  {detail}"
        request.config.acceptance_lines.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)
