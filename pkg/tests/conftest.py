"""
Pytest configuration and shared fixtures for ttcalc tests
"""

import sys
from pathlib import Path

import pytest

# Add parent directory to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.models.field import Field  # noqa: E402
from src.utils.io import load_algebra, load_bimodule  # noqa: E402

FIXTURES_DIR = Path(__file__).parent.parent / "data" / "fixtures"


@pytest.fixture
def qq():
    return Field.rational()


@pytest.fixture
def ground_field():
    return load_algebra("ground_field")


@pytest.fixture
def dual_numbers():
    return load_algebra("dual_numbers")


@pytest.fixture
def kxk():
    return load_algebra("kxk")


@pytest.fixture
def t2():
    return load_algebra("t2")


@pytest.fixture
def m2():
    return load_algebra("m2")


@pytest.fixture
def a3_linear():
    return load_algebra("a3_linear")


@pytest.fixture
def a3_zigzag():
    return load_algebra("a3_zigzag")


@pytest.fixture
def nonassociative():
    return load_algebra("nonassociative")


@pytest.fixture
def a3_tilting():
    return load_bimodule("a3_tilting")


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR
