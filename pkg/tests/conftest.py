# tests/conftest.py

"""
Shared fixtures: seeded numpy generators and small random instances.
"""

import numpy as np
import pytest

from ricci_mcmc.generator import WeightMatrix
from ricci_mcmc.simplex import RandomSource, sample_uniform_simplex, validate_distribution


@pytest.fixture
def rng():
    return RandomSource(20240601).generator()


@pytest.fixture
def pi3():
    return validate_distribution([0.5, 1 / 3, 1 / 6])


@pytest.fixture
def pi2():
    return validate_distribution([0.75, 0.25])


@pytest.fixture
def random_pair(rng):
    """Factory returning (pi, p0) at a given n."""

    def make(n):
        return sample_uniform_simplex(n, rng), sample_uniform_simplex(n, rng)

    return make


@pytest.fixture
def random_symmetric_weights(rng):
    """Factory for a random symmetric omega with row sums pi (complete graph)."""

    def make(n):
        raw = rng.uniform(0.5, 1.5, size=n)
        pi = raw / raw.sum()
        bound = np.minimum.outer(pi, pi) / (n - 1)
        off = np.triu(0.9 * bound * rng.uniform(0.1, 1.0, size=(n, n)), 1)
        off = off + off.T
        # each row of off sums below 0.9 pi_i, the rest goes on the diagonal
        w = off.copy()
        np.fill_diagonal(w, pi - off.sum(axis=1))
        return WeightMatrix(w, validate_distribution(pi))

    return make
