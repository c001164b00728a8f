"""Shared fixtures: seeded generators and small hand-built spaces."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.spaces.measure_algebra import MeasureAlgebra


@pytest.fixture
def rng():
    return np.random.default_rng(20190914)


@pytest.fixture
def two_halves():
    """Two atoms of weight 1/2."""
    return MeasureAlgebra.of([0.5, 0.5])


@pytest.fixture
def unit_interval():
    """One realized component of measure 1."""
    return MeasureAlgebra.of((), [("aleph_0", 1.0)])


@pytest.fixture
def mixed_space():
    """Two atoms, one realized component and one aleph_1 component."""
    return MeasureAlgebra.of([0.25, 0.5], [("aleph_0", 1.0), ("aleph_1", 0.75)])
