import math

from fractions import Fraction as F

import numpy as np
import pytest

from phenocalc.src.errors import InvalidArgument, NotAtomic
from phenocalc.src.mixtures import constant_phenomenon, uniform_phenomenon
from phenocalc.src.sampler import (
    exchangeability_check,
    monte_carlo_theorem1,
    predictive_table,
    sample_bits,
    sample_run,
    sample_sequence,
    stream,
)


def test_extreme_constants_are_deterministic():
    assert sample_sequence(constant_phenomenon(1), 20, stream(3, 0)) == [True] * 20
    assert sample_sequence(constant_phenomenon(0), 20, stream(3, 0)) == [False] * 20
    assert sample_run(constant_phenomenon(1), 7, 50, seed=1).results == (7,) * 50


def test_uniform_predictive_table(uniform):
    table = predictive_table(uniform, 2)
    assert table[0, 0] == pytest.approx(1 / 2)
    assert table[1, 0] == pytest.approx(2 / 3)
    assert table[0, 1] == pytest.approx(1 / 3)


def test_float_uniform_table_is_the_rule_of_succession():
    n = 60
    table = predictive_table(uniform_phenomenon(depth=n, backend="float"), n)
    for r in range(n):
        for s in range(n - r):
            assert table[r, s] == pytest.approx((r + 1) / (r + s + 2), rel=1e-12)


def test_atomic_table_matches_moment_route(urn_mixture):
    atomic = predictive_table(urn_mixture, 8)
    moments = predictive_table(urn_mixture.to_moments(8), 8)
    for r in range(8):
        for s in range(8 - r):
            assert atomic[r, s] == pytest.approx(moments[r, s], abs=1e-12)


def test_unreachable_states_hold_zero():
    table = predictive_table(constant_phenomenon(1), 4)
    assert table[0, 1] == 0
    assert table[3, 0] == 1


def test_runs_are_reproducible(urn_mixture):
    first = sample_run(urn_mixture, 30, 10000, seed=5, workers=1)
    again = sample_run(urn_mixture, 30, 10000, seed=5, workers=4)
    assert first.results == again.results
    assert sample_run(urn_mixture, 30, 10000, seed=6).results != first.results


def test_sample_bits_shape(uniform):
    bits = sample_bits(uniform, 12, 9000, seed=2)
    assert bits.shape == (9000, 12)
    assert set(np.unique(bits)) <= {0, 1}


def test_constant_monte_carlo():
    report = monte_carlo_theorem1(constant_phenomenon(F(1, 2)), 100, 10000, "0.4", "0.6", seed=42)
    assert report.within(3)
    assert report.hits <= report.trials
    assert report.to_dict()["xi1"] == "2/5"


def test_urn_monte_carlo(urn_mixture):
    report = monte_carlo_theorem1(urn_mixture, 60, 20000, 0.25, 0.42, seed=42)
    assert report.within(3)


def test_monte_carlo_needs_trials(uniform):
    with pytest.raises(InvalidArgument):
        monte_carlo_theorem1(uniform, 10, 0, "0.2", "0.4")
    with pytest.raises(InvalidArgument):
        monte_carlo_theorem1(uniform, 10, 100, "0.4", "0.2")


def test_uniform_is_exchangeable(uniform):
    report = exchangeability_check(uniform, 3, 200000, seed=42)
    assert len(report.patterns) == 8
    assert report.passes()
    for p in report.patterns:
        assert p.expected == pytest.approx(1 / (4 * math.comb(3, p.successes)))


def test_predictive_sampling_of_atoms_is_exchangeable(two_point, urn_mixture):
    for ph in (two_point, urn_mixture, two_point.to_moments(4)):
        report = exchangeability_check(ph, 4, 100000, seed=13)
        assert report.passes()
        assert set(report.class_p_values) == {1, 2, 3}


def test_two_stage_sampling_is_exchangeable(urn_mixture):
    report = exchangeability_check(urn_mixture, 4, 100000, seed=9, method="two-stage")
    assert report.passes()
    assert set(report.class_p_values) == {1, 2, 3}


def test_two_stage_needs_atoms(uniform):
    with pytest.raises(NotAtomic):
        sample_run(uniform, 5, 10, method="two-stage")


def test_pattern_length_is_bounded(uniform):
    with pytest.raises(InvalidArgument):
        exchangeability_check(uniform, 13, 10)
