from __future__ import annotations

from pathlib import Path

import pytest

from lpa.branching import build_interval_system, build_rotation_system
from lpa.graph import parse_graph

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


def graph_file(name: str):
    return parse_graph((DATA / name).read_text())


@pytest.fixture
def loop():
    return graph_file("loop.g")


@pytest.fixture
def rose():
    return graph_file("rose2.g")


@pytest.fixture
def edge_graph():
    return graph_file("edge.g")


@pytest.fixture
def path3():
    return graph_file("path3.g")


@pytest.fixture
def loop_rot(loop):
    return build_rotation_system(loop)


@pytest.fixture
def rose_rot(rose):
    return build_rotation_system(rose)


@pytest.fixture
def loop_int(loop):
    return build_interval_system(loop)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
