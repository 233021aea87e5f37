from fractions import Fraction as F

import pytest

from phenocalc.src.mixtures import mixture_of_hypotheses, uniform_phenomenon, urn_scenario
from phenocalc.src.primitives.phenomenon import AtomicMixture
from phenocalc.src.utils.generate import simulate_atomic_mixtures, simulate_moment_sequences


@pytest.fixture
def uniform():
    return uniform_phenomenon(depth=64)


@pytest.fixture
def urn_model():
    return urn_scenario(12, 4, 6, "2/3", "1/3")


@pytest.fixture
def urn_mixture(urn_model):
    return mixture_of_hypotheses(urn_model)


@pytest.fixture
def two_point():
    return AtomicMixture(atoms=[(F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))])


@pytest.fixture(scope="session")
def random_mixtures():
    return simulate_atomic_mixtures(n=200, seed=7)


@pytest.fixture(scope="session")
def random_sequences():
    return simulate_moment_sequences(n=12, seed=11, depth=20)
