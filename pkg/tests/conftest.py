import pytest

from conductest import generators as gen


@pytest.fixture
def k4():
    return gen.complete(4)


@pytest.fixture
def db4():
    return gen.dumbbell(4)


@pytest.fixture
def c4():
    return gen.cycle(4)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
