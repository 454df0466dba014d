import random

import pytest

from gshe.symbols import GAMMA, NOISE


@pytest.fixture
def rng():
    return random.Random(20240811)


@pytest.fixture
def spde_gens():
    return [NOISE, GAMMA]
