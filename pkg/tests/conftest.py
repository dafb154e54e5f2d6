import pytest

from helpers import ACCEPTANCE_LINES, fixture_problems


@pytest.fixture(scope="session")
def problems():
    return fixture_problems()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
