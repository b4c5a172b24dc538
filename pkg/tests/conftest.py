import pytest

from expander_listdec.codes import make_linear_code, make_rs_code
from expander_listdec.graphs import double_cover, from_neighbors
from expander_listdec.ael import build_ael
from expander_listdec.tanner import build_tanner


@pytest.fixture
def k22():
    return from_neighbors([[0, 1], [0, 1]])


@pytest.fixture
def hexagon():
    return double_cover(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def rep2():
    return make_linear_code(2, [[1, 1]])


@pytest.fixture
def k22_tanner(k22, rep2):
    return build_tanner(k22, rep2)


@pytest.fixture
def tiny_ael(k22, rep2):
    return build_ael(rep2, make_rs_code(2, 2, 1), k22)


@pytest.fixture
def c5():
    return make_linear_code(2, [[1, 1, 0, 0, 0], [0, 0, 1, 1, 1]])


def rows(words):
    return sorted(tuple(int(s) for s in w) for w in words)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
