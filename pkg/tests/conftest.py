import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from raagkit import atlas
from raagkit.graph import SimplicialGraph, asymmetric_tree, build_focused

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def catalog8():
    return atlas.enumerate_catalog(8)


@pytest.fixture(scope="session")
def wide_focused():
    trees = [asymmetric_tree(p) for p in ("a", "b", "e")]
    return build_focused(4, 7, trees)


def graph(vertices, edges, name="G"):
    return SimplicialGraph.from_edges(list(vertices), [tuple(e) for e in edges], name=name)


@pytest.fixture
def path3():
    return graph("abc", ["ab", "bc"])


@pytest.fixture
def path5():
    return graph("abcde", ["ab", "bc", "cd", "de"])


@pytest.fixture
def claw():
    return graph("cabd", ["ca", "cb", "cd"])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
