import numpy as np
import pytest

from lieflow.groups import GroupId

_ACCEPTANCE = {}


@pytest.fixture
def torus1():
    return GroupId.torus(1)


@pytest.fixture
def torus2():
    return GroupId.torus(2)


@pytest.fixture
def su2():
    return GroupId.su2()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record():
    """Store the outcome of an acceptance criterion for the terminal summary."""

    def _record(number, passed, detail):
        _ACCEPTANCE[number] = (bool(passed), detail)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
