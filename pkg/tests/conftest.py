# tests/conftest.py - Shared fixtures for the hullscope test suite
import numpy as np
import pytest

from tools.fixtures import generate


@pytest.fixture(scope="session")
def circle_fixture():
    return generate("circle", {"samples": 256})


@pytest.fixture(scope="session")
def circle_compact(circle_fixture):
    return circle_fixture.compact


@pytest.fixture(scope="session")
def torus2_compact():
    return generate("torus2", {"samples": 64}).compact


@pytest.fixture(scope="session")
def small_torus2_compact():
    return generate("torus2", {"samples": 32}).compact


@pytest.fixture(scope="session")
def unit_circle_compact():
    return generate("unit-circle", {"samples": 256}).compact


@pytest.fixture(scope="session")
def annulus_compact():
    return generate("annulus", {"samples": 256}).compact


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
