"""
Pytest configuration and shared fixtures
"""

import math
import os
import shutil
import tempfile

import pytest

from pinball.catalog import equilateral, known_polygon, regular_polygon, tri306090, tri454590
from pinball.geometry import build_polygon


@pytest.fixture
def temp_dir():
    """Create a temporary directory for testing"""
    temp_dir = tempfile.mkdtemp()
    yield temp_dir
    shutil.rmtree(temp_dir)


@pytest.fixture
def triangle():
    """Equilateral triangle with unit sides, side 1 on the x-axis"""
    return equilateral()


@pytest.fixture
def square():
    """Unit square"""
    return known_polygon("square")[0]


@pytest.fixture
def right_triangle_30():
    """30-60-90 triangle with the right angle at (1, 0)"""
    return tri306090()


@pytest.fixture
def right_triangle_45():
    """45-45-90 triangle with the right angle at the origin"""
    return tri454590()


@pytest.fixture
def hexagon():
    return regular_polygon(6, name="hexagon")


@pytest.fixture
def l_shape():
    """Non-convex L-shaped hexagon"""
    return build_polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)], name="L")


@pytest.fixture
def sample_config():
    """Sample configuration for testing"""
    return {
        "log_level": "DEBUG",
        "max_workers": 2,
        "stability": {"strict_margin": 1e-10},
        "search": {"samples": 8, "seed": 3},
    }


@pytest.fixture
def polygon_file(temp_dir):
    """Vertex file of the equilateral triangle"""
    path = os.path.join(temp_dir, "triangle.txt")
    with open(path, "w") as f:
        f.write("# equilateral triangle\n")
        f.write("0 0\n1 0\n")
        f.write(f"0.5 {math.sqrt(3) / 2!r}\n")
    return path
