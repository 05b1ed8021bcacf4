import os
import sys

import hypothesis
import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.config import Config
from src.measure import make_measure
from src.space import GroundSpace

hypothesis.settings.register_profile("fast", max_examples=20)
hypothesis.settings.register_profile("thorough", max_examples=500)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "test_data")


@pytest.fixture
def data_path():
    def resolve(name: str) -> str:
        return os.path.join(DATA_DIR, name)
    return resolve


@pytest.fixture
def rng():
    return np.random.default_rng(Config.DEFAULT_SEED)


@pytest.fixture
def worked_space():
    """Two points at distance 1 with diam X = 1."""
    return GroundSpace.from_matrix(["a", "b"], [[0, 1], [1, 0]], diam=1, name="space_worked")


@pytest.fixture
def worked_pair(worked_space):
    mu1 = make_measure(worked_space, [("a", 0.0)])
    mu2 = make_measure(worked_space, [("a", 0.0), ("b", -2.0)])
    return mu1, mu2


@pytest.fixture
def line_space():
    """Three collinear points a - b - c with unit steps."""
    return GroundSpace.from_matrix(["a", "b", "c"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]], name="line")
