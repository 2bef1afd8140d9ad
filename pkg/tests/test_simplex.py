# tests/test_simplex.py

"""
Tests for distributions on the open simplex and seeded sampling.
"""

import numpy as np
import pytest

from ricci_mcmc.errors import DimensionMismatch, DistributionError, NonPositiveEntry, NotNormalized, TooFewStates
from ricci_mcmc.simplex import (
    Distribution,
    RandomSource,
    l1_distance,
    sample_uniform_simplex,
    validate_distribution,
)


class TestValidateDistribution:
    """Test validation of raw vectors."""

    def test_accepts_valid_vector(self):
        d = validate_distribution([0.75, 0.25])
        assert d.values.tolist() == [0.75, 0.25]
        assert d.n == 2

    def test_renormalizes_within_tolerance(self):
        d = validate_distribution([0.5, 0.5 + 5e-13])
        assert abs(float(np.sum(d.values)) - 1.0) < 1e-15

    def test_rejects_zero_entry(self):
        with pytest.raises(NonPositiveEntry):
            validate_distribution([1.0, 0.0])

    def test_rejects_negative_entry(self):
        with pytest.raises(NonPositiveEntry):
            validate_distribution([1.2, -0.2])

    def test_rejects_nan(self):
        with pytest.raises(NonPositiveEntry):
            validate_distribution([float("nan"), 0.5])

    def test_rejects_bad_sum(self):
        with pytest.raises(NotNormalized):
            validate_distribution([0.5, 0.6])

    def test_rejects_single_state(self):
        with pytest.raises(TooFewStates):
            validate_distribution([1.0])

    def test_errors_share_family(self):
        with pytest.raises(DistributionError):
            validate_distribution([0.5, 0.6])


class TestDistribution:
    """Test the immutable value type."""

    def test_values_are_read_only(self):
        d = validate_distribution([0.5, 0.5])
        with pytest.raises(ValueError):
            d.values[0] = 0.9

    def test_equality_and_hash(self):
        a = validate_distribution([0.5, 0.5])
        b = Distribution(np.array([0.5, 0.5]))
        assert a == b
        assert hash(a) == hash(b)

    def test_iteration(self):
        assert list(validate_distribution([0.25, 0.75])) == [0.25, 0.75]


class TestSampling:
    """Test uniform simplex sampling."""

    def test_samples_are_valid(self):
        gen = RandomSource(7).generator()
        for n in (2, 5, 250):
            d = sample_uniform_simplex(n, gen)
            assert d.n == n
            assert np.all(d.values > 0)
            assert abs(float(np.sum(d.values)) - 1.0) < 1e-12

    def test_same_stream_same_draw(self):
        a = sample_uniform_simplex(10, RandomSource(42, 3))
        b = sample_uniform_simplex(10, RandomSource(42, 3))
        assert a == b

    def test_streams_differ(self):
        a = sample_uniform_simplex(10, RandomSource(42, 1))
        b = sample_uniform_simplex(10, RandomSource(42, 2))
        assert a != b

    def test_marginal_mean(self):
        # flat Dirichlet on n states has E[x_i] = 1/n
        gen = RandomSource(1).generator()
        draws = np.array([sample_uniform_simplex(4, gen).values for _ in range(4000)])
        assert np.allclose(draws.mean(axis=0), 0.25, atol=0.02)

    def test_rejects_one_state(self):
        with pytest.raises(TooFewStates):
            sample_uniform_simplex(1, RandomSource(0))

    def test_seed_range(self):
        with pytest.raises(ValueError):
            RandomSource(-1)
        with pytest.raises(ValueError):
            RandomSource(2**64)


class TestL1Distance:
    """Test the L1 distance."""

    def test_value(self):
        assert l1_distance([0.5, 0.5], [0.75, 0.25]) == pytest.approx(0.5)

    def test_self_distance_zero(self):
        d = validate_distribution([0.2, 0.3, 0.5])
        assert l1_distance(d, d) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            l1_distance([0.5, 0.5], [0.2, 0.3, 0.5])
