from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest

from ultraqs.mapping import PointMap
from ultraqs.space import load_space

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden" / "v1"


def load(name: str, **kw):
    return load_space(FIXTURES / name, **kw)


@pytest.fixture
def x3():
    return load("X3.json")


@pytest.fixture
def eq3():
    return load("Eq3.json")


@pytest.fixture
def x4():
    return load("X4.json")


@pytest.fixture
def y4():
    return load("Y4.json")


@pytest.fixture
def squared(x4, y4):
    """X4 -> Y4, identity on points, every distance squared."""
    return PointMap.identity(x4, y4)


@pytest.fixture
def doubled(x4):
    return PointMap.identity(x4, load("X4_times2.json"))


def F(x) -> Fraction:
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
