import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from stacklab import GameInstance, TABLE1, APPENDIX_A1, random_game
from stacklab.rng import RngStream


@pytest.fixture
def table1():
    return TABLE1


@pytest.fixture
def appendix_a1():
    return APPENDIX_A1


@pytest.fixture
def flat_leader_game():
    """Leader indifferent everywhere: every response function ties."""
    return GameInstance(mu_l=[[0.5, 0.5], [0.5, 0.5]], mu_f=[[0.2, 0.6], [0.5, 0.4]], name="flat")


@pytest.fixture
def make_game():
    """Seeded regular random game factory."""
    def build(A: int, B: int, seed: int) -> GameInstance:
        return random_game(A, B, RngStream(seed, "game"))
    return build
