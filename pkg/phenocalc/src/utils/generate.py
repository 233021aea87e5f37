from fractions import Fraction
from typing import List

import numpy as np

from phenocalc.src.primitives.phenomenon import AtomicMixture, MomentSequence


def random_atomic_mixture(rng: np.random.Generator, max_atoms: int = 5, denominator: int = 12) -> AtomicMixture:
    """Exact mixture of 1..max_atoms distinct atoms k/denominator with random positive weights."""
    k = int(rng.integers(1, max_atoms + 1))
    numerators = rng.choice(denominator + 1, size=k, replace=False)
    raw = [int(w) for w in rng.integers(1, 10, size=k)]
    total = sum(raw)
    return AtomicMixture(atoms=[(Fraction(int(a), denominator), Fraction(w, total)) for a, w in zip(numerators, raw)])


def random_moment_sequence(rng: np.random.Generator, depth: int = 20) -> MomentSequence:
    """
    Valid truncated moment sequence: a random atomic part blended with the uniform phenomenon, so
    the mixing measure has both atoms and a continuous part.
    """
    atomic = random_atomic_mixture(rng)
    blend = Fraction(int(rng.integers(0, 4)), 4)
    values = [(1 - blend) * atomic.moment(h) + blend * Fraction(1, h + 1) for h in range(depth + 1)]
    return MomentSequence(values=values)


def simulate_atomic_mixtures(n: int = 200, seed: int = 42, max_atoms: int = 5) -> List[AtomicMixture]:
    rng = np.random.default_rng(seed)
    return [random_atomic_mixture(rng, max_atoms) for _ in range(n)]


def simulate_moment_sequences(n: int = 20, seed: int = 42, depth: int = 20) -> List[MomentSequence]:
    rng = np.random.default_rng(seed)
    return [random_moment_sequence(rng, depth) for _ in range(n)]
