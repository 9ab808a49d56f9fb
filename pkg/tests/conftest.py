import pytest

from rlnc_intercept.field import gf_create


@pytest.fixture(scope="session")
def gf256():
    return gf_create(256)


@pytest.fixture(scope="session")
def gf2():
    return gf_create(2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
