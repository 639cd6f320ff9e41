import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from meshgen import equilateral_strip, hexagon_fan, nonuniform_line  # noqa: E402

import decphs as d  # noqa: E402


@pytest.fixture(scope="session")
def kite():
    return d.two_triangle_example()


@pytest.fixture(scope="session")
def line4():
    return d.uniform_interval(4)


@pytest.fixture(scope="session")
def test_meshes(kite):
    """The fixture mesh plus generated well-centered meshes of both dimensions."""
    return [
        kite.complex,
        equilateral_strip(3),
        equilateral_strip(5),
        hexagon_fan(),
        d.uniform_interval(4),
        nonuniform_line(),
    ]
