import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oamds import make_params  # noqa: E402
from oamds.field import GF5, GF7, GF256  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def example_params():
    """s = r = 3, m = 2 over GF(7): n = 6, k = 3, l = 9."""
    return make_params(1, 3, 3, 2, 0, GF7)


@pytest.fixture(scope="session")
def group_params():
    """s = 2, r = 3, m = 3 over GF(7): n = 6, k = 3, l = 8."""
    return make_params(1, 2, 3, 3, 0, GF7)


@pytest.fixture(scope="session")
def small_params():
    """s = r = 2, m = 2 over GF(5): n = 4, k = 2, l = 4."""
    return make_params(1, 2, 2, 2, 0, GF5)


@pytest.fixture(scope="session")
def ext_params():
    """Construction 2 with r = 3, m = 1, r' = 2 over GF(7): n = 5, k = 2, l = 9."""
    return make_params(2, 3, 3, 1, 2, GF7)


@pytest.fixture(scope="session")
def file_params():
    return make_params(1, 3, 3, 2, 0, GF256)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
