import math

from fractions import Fraction as F

import pytest

from phenocalc.src.errors import (
    AtomOutOfRange,
    ImpossibleEvidence,
    InvalidArgument,
    InvalidUrnGeometry,
    MixedBackend,
    NotAtomic,
    SpecParseError,
    WeightsNotNormalized,
)
from phenocalc.src.mixtures import (
    atomic_mixture,
    constant_phenomenon,
    dominant_atoms,
    hypothesis_posterior,
    limit_thresholds,
    mixture_of_hypotheses,
    near_threshold,
    posterior_limit,
    posterior_trajectory,
    product_independent,
    uniform_grid_phenomenon,
    uniform_phenomenon,
    urn_scenario,
)
from phenocalc.src.occupancy import occupancy_row
from phenocalc.src.operators import predictive_probability
from phenocalc.src.primitives.evidence import EvidenceCount, parse_outcomes
from phenocalc.src.primitives.hypotheses import HypothesisModel

URN_ATOMS = ((0, F(2, 99)), (F(1, 6), F(16, 99)), (F(1, 3), F(63, 99)), (F(1, 2), F(16, 99)), (F(2, 3), F(2, 99)))

# posterior of the kept-proportion hypothesis after six draws, r of them white
PRINTED = {6: 0.088353, 5: 0.176707, 4: 0.279365, 3: 0.359918, 2: 0.389812, 1: 0.353947}


def closed_form(r, s):
    return F(33 * 2 ** r * 4 ** s, 16 * 5 ** s + 63 * 2 ** r * 4 ** s + 16 * 3 ** (r + s) + 2 * 4 ** r * 2 ** s)


def posterior_of(pairs, label):
    return dict(pairs)[label]


def test_atomic_mixture_construction():
    ph = atomic_mixture([(F(1, 2), F(1, 4)), (F(1, 2), F(1, 4)), (F(1, 5), F(1, 2)), (F(9, 10), 0)])
    assert ph.atoms == ((F(1, 5), F(1, 2)), (F(1, 2), F(1, 2)))
    extremes = atomic_mixture([(0, F(1, 2)), (1, F(1, 2))])
    assert extremes.moments(4) == [1, F(1, 2), F(1, 2), F(1, 2), F(1, 2)]
    assert ph.depth is None


@pytest.mark.parametrize("atoms, error", [
    ([(F(1, 2), F(1, 2))], WeightsNotNormalized),
    ([(F(1, 2), F(3, 2)), (F(1, 3), F(-1, 2))], WeightsNotNormalized),
    ([(F(3, 2), 1)], AtomOutOfRange),
    ([(0.5, F(1, 2)), (0.25, F(1, 2))], MixedBackend),
    ([(F(1, 2),)], SpecParseError),
])
def test_atomic_mixture_rejects(atoms, error):
    with pytest.raises(error):
        atomic_mixture(atoms)


def test_atoms_from_dicts():
    ph = atomic_mixture([{"p": "1/3", "weight": "1/2"}, {"p": "2/3", "weight": "1/2"}])
    assert ph.points == [F(1, 3), F(2, 3)]


def test_constant_and_uniform(uniform):
    assert constant_phenomenon(0).moments(3) == [1, 0, 0, 0]
    assert constant_phenomenon(1).moments(3) == [1, 1, 1, 1]
    with pytest.raises(AtomOutOfRange):
        constant_phenomenon(F(5, 4))
    assert occupancy_row(uniform, 9).probs == (F(1, 10),) * 10
    assert predictive_probability(uniform, EvidenceCount(r=4, s=2)) == F(5, 8)
    assert uniform.moment(1) == F(1, 2)
    assert uniform_phenomenon(depth=5, backend="float").values[2] == pytest.approx(1 / 3)


def test_uniform_grid():
    grid = uniform_grid_phenomenon(5)
    assert grid.atoms == tuple((F(k, 4), F(1, 5)) for k in range(5))
    with pytest.raises(InvalidArgument):
        uniform_grid_phenomenon(1)


def test_products(uniform):
    p, q = F(1, 3), F(3, 4)
    assert product_independent(constant_phenomenon(p), constant_phenomenon(q)).atoms == ((p * q, 1),)
    scaled = product_independent(constant_phenomenon(p), uniform)
    assert scaled.values == tuple(p ** h / (h + 1) for h in range(65))
    ph = atomic_mixture([(F(1, 4), F(1, 3)), (F(1, 2), F(2, 3))])
    assert product_independent(ph, constant_phenomenon(1)).atoms == ph.atoms


def test_products_commute_and_associate(random_sequences):
    a, b, c = random_sequences[:3]
    assert product_independent(a, b).values == product_independent(b, a).values
    left = product_independent(product_independent(a, b), c)
    right = product_independent(a, product_independent(b, c))
    assert left.values == right.values == product_independent(a, b, c).values


def test_product_backends_must_match():
    with pytest.raises(MixedBackend):
        product_independent(constant_phenomenon(F(1, 2)), constant_phenomenon(0.5))


def test_urn_mixture(urn_model, urn_mixture):
    assert urn_model.labels == ["a", "b"]
    assert urn_model.components[0].phenomenon.atoms == (
        (0, F(1, 33)), (F(1, 6), F(8, 33)), (F(1, 3), F(15, 33)), (F(1, 2), F(8, 33)), (F(2, 3), F(1, 33)))
    assert urn_model.components[1].phenomenon.atoms == ((F(1, 3), 1),)
    assert urn_mixture.atoms == URN_ATOMS


def test_single_hypothesis_is_its_phenomenon(uniform):
    model = HypothesisModel.from_pairs([("only", uniform, 1)])
    assert mixture_of_hypotheses(model).values == uniform.values


def test_mixture_of_two_constants():
    model = HypothesisModel.from_pairs([
        ("low", constant_phenomenon(F(1, 5)), F(1, 4)),
        ("high", constant_phenomenon(F(4, 5)), F(3, 4)),
    ])
    assert mixture_of_hypotheses(model).atoms == ((F(1, 5), F(1, 4)), (F(4, 5), F(3, 4)))
    assert mixture_of_hypotheses(model, depth=3).values == tuple(
        F(1, 4) * F(1, 5) ** h + F(3, 4) * F(4, 5) ** h for h in range(4))


@pytest.mark.parametrize("pairs, error", [
    ([("a", constant_phenomenon(F(1, 2)), F(1, 2))], WeightsNotNormalized),
    ([("a", constant_phenomenon(F(1, 2)), F(1, 2)), ("a", constant_phenomenon(F(1, 3)), F(1, 2))], SpecParseError),
    ([("a", constant_phenomenon(F(1, 2)), 1), ("b", constant_phenomenon(F(1, 3)), 0)], WeightsNotNormalized),
    ([("a", constant_phenomenon(F(1, 2)), F(1, 2)), ("b", constant_phenomenon(0.5), F(1, 2))], MixedBackend),
])
def test_invalid_hypothesis_models(pairs, error):
    with pytest.raises(error):
        HypothesisModel.from_pairs(pairs)


def test_hypothesis_model_json(urn_model):
    again = HypothesisModel.from_dict(urn_model.to_dict())
    assert again.labels == urn_model.labels
    assert again.priors == urn_model.priors
    assert mixture_of_hypotheses(again).atoms == URN_ATOMS


def test_urn_posteriors_match_printed_values(urn_model):
    for r, printed in PRINTED.items():
        b = posterior_of(hypothesis_posterior(urn_model, EvidenceCount(r=r, s=6 - r)), "b")
        assert b == closed_form(r, 6 - r)
        assert abs(float(b) - printed) <= 5e-6
    assert posterior_of(hypothesis_posterior(urn_model, EvidenceCount(r=6)), "b") == F(2112, 23904)


def test_urn_posterior_without_white_draws(urn_model):
    # the closed form leaves out the l = 0 atom, which only matters when no white ball was drawn
    b = posterior_of(hypothesis_posterior(urn_model, EvidenceCount(r=0, s=6)), "b")
    assert b == F(135168, 613152)
    assert float(b) == pytest.approx(0.220448, abs=5e-7)
    assert closed_form(0, 6) == F(135168, 519840)


def test_posteriors_sum_to_one_and_start_at_priors(urn_model):
    assert hypothesis_posterior(urn_model, EvidenceCount()) == [("a", F(2, 3)), ("b", F(1, 3))]
    for r in range(8):
        for s in range(8):
            assert sum(w for _, w in hypothesis_posterior(urn_model, EvidenceCount(r=r, s=s))) == 1


def test_bayes_update_uses_component_predictives(urn_model):
    for r, s in [(0, 0), (2, 1), (3, 4)]:
        ev = EvidenceCount(r=r, s=s)
        before = dict(hypothesis_posterior(urn_model, ev))
        predictives = {
            c.label: predictive_probability(c.phenomenon, ev) for c in urn_model.components
        }
        total = sum(before[label] * predictives[label] for label in before)
        after = dict(hypothesis_posterior(urn_model, EvidenceCount(r=r + 1, s=s)))
        for label in before:
            assert after[label] == before[label] * predictives[label] / total


def test_impossible_posterior():
    model = HypothesisModel.from_pairs([("zero", constant_phenomenon(0), F(1, 2)), ("one", constant_phenomenon(1), F(1, 2))])
    with pytest.raises(ImpossibleEvidence):
        hypothesis_posterior(model, EvidenceCount(r=1, s=1))


def test_urn_geometry():
    model = urn_scenario(4, 2, 2, "1/2", "1/2")
    assert model.components[0].phenomenon.atoms == ((0, F(1, 6)), (F(1, 2), F(4, 6)), (1, F(1, 6)))
    empty = urn_scenario(12, 0, 6, "2/3", "1/3")
    assert all(c.phenomenon.atoms == ((0, 1),) for c in empty.components)


@pytest.mark.parametrize("args", [
    (12, 4, 5, "2/3", "1/3"),
    (6, 2, 6, "2/3", "1/3"),
    (12, 5, 6, "2/3", "1/3"),
    (12, 13, 6, "2/3", "1/3"),
    (12, 4, 6, "2/3", "1/2"),
    (12, 4, 6, "1", "0"),
])
def test_invalid_urns(args):
    with pytest.raises(InvalidUrnGeometry):
        urn_scenario(*args)


def test_trajectory(urn_model):
    steps = posterior_trajectory(urn_model, parse_outcomes("WWWWWW"))
    assert len(steps) == 7
    assert steps[0].posteriors == (("a", F(2, 3)), ("b", F(1, 3)))
    assert steps[0].predictive == F(1, 3)
    assert steps[-1].weight("b") == F(2112, 23904)
    alternating = posterior_trajectory(urn_model, parse_outcomes("WBWBWB"))
    assert abs(float(alternating[-1].weight("b")) - 0.359918) <= 5e-6


def test_trajectory_matches_posteriors_at_every_step(urn_model):
    outcomes = parse_outcomes("WBBWWBBB")
    for step in posterior_trajectory(urn_model, outcomes):
        assert list(step.posteriors) == hypothesis_posterior(urn_model, step.evidence)
        assert sum(w for _, w in step.posteriors) == 1


def test_trajectory_predictive_is_the_mixture_predictive(urn_model, urn_mixture):
    for step in posterior_trajectory(urn_model, parse_outcomes("BWBB")):
        assert step.predictive == predictive_probability(urn_mixture, step.evidence)


def test_single_hypothesis_trajectory():
    model = HypothesisModel.from_pairs([("c", constant_phenomenon(F(1, 2)), 1)])
    assert all(step.weight("c") == 1 for step in posterior_trajectory(model, parse_outcomes("WBWWB")))


def test_posterior_limits(urn_model):
    assert posterior_of(posterior_limit(urn_model, F(3, 10)), "b") == F(33, 63)
    for f in (F(1, 4), F(1, 3), F(2, 5), "0.3", 0.3):
        assert posterior_of(posterior_limit(urn_model, f), "b") == F(33, 63)
    assert posterior_of(posterior_limit(urn_model, F(3, 10)), "a") == F(30, 63)
    for f in (F(9, 10), F(1, 10), F(6, 25), F(21, 50), 0, 1):
        assert posterior_of(posterior_limit(urn_model, f), "b") == 0


def test_posterior_limit_at_thresholds(urn_model):
    lower = math.log(5 / 4) / math.log(5 / 2)
    upper = math.log(4 / 3) / math.log(2)
    assert posterior_of(posterior_limit(urn_model, lower), "b") == F(33, 79)
    assert posterior_of(posterior_limit(urn_model, upper), "b") == F(33, 79)


def test_limit_thresholds(urn_model):
    thresholds = limit_thresholds(urn_model)
    frequencies = [t.frequency for t in thresholds]
    assert frequencies[0] == 0.0
    assert frequencies[1] == pytest.approx(0.243529, abs=1e-6)
    assert frequencies[2] == pytest.approx(0.415037, abs=1e-6)
    assert near_threshold(urn_model, frequencies[1]).lower == F(1, 6)
    assert near_threshold(urn_model, F(3, 10)) is None


def test_dominant_atoms_with_only_extremes():
    assert dominant_atoms([F(0), F(1)], F(1, 2)) == [0, 1]
    assert dominant_atoms([F(0), F(1)], 0.5) == [0, 1]


def test_posterior_limit_needs_atoms(uniform):
    model = HypothesisModel.from_pairs([("u", uniform, 1)])
    with pytest.raises(NotAtomic):
        posterior_limit(model, F(1, 2))
    with pytest.raises(InvalidArgument):
        posterior_limit(urn_scenario(12, 4, 6, "2/3", "1/3"), F(3, 2))


def test_trajectory_approaches_the_limit():
    model = urn_scenario(12, 4, 6, "2/3", "1/3", backend="float")
    steps = posterior_trajectory(model, parse_outcomes("WBB" * 200))
    assert steps[-1].evidence == EvidenceCount(r=200, s=400)
    assert abs(steps[-1].weight("b") - 33 / 63) <= 0.02
