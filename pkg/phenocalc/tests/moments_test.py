import math

from fractions import Fraction as F

import pytest

from phenocalc.src.errors import (
    DepthExceeded,
    IndexOutOfRange,
    MixedBackend,
    NotAProbability,
    NotCompletelyMonotone,
    NotUnitAtZero,
    SpecParseError,
)
from phenocalc.src.limitdist import limiting_cdf_exact, theorem1_interval
from phenocalc.src.mixtures import constant_phenomenon, uniform_phenomenon
from phenocalc.src.moments import difference_table, finite_difference, mixing_moment, new_moment_sequence
from phenocalc.src.primitives.phenomenon import MomentSequence, phenomenon_from_dict


def test_uniform_moments_are_valid():
    ph = new_moment_sequence([F(1), F(1, 2), F(1, 3), F(1, 4)])
    assert ph.depth == 3
    assert ph.backend == "exact"


def test_single_value_is_depth_zero():
    ph = new_moment_sequence([1])
    assert ph.depth == 0
    assert ph.moment(0) == 1


def test_not_completely_monotone_reports_witness():
    with pytest.raises(NotCompletelyMonotone) as info:
        new_moment_sequence(["1", "1/2", "3/5"])
    assert (info.value.h, info.value.j) == (1, 1)
    assert info.value.to_dict()["error"] == "NotCompletelyMonotone"


def test_second_difference_violation():
    # nonincreasing, but Δ² a_0 = 1/10 - 2/10 < 0
    with pytest.raises(NotCompletelyMonotone) as info:
        new_moment_sequence(["1", "9/10", "7/10", "1/10"])
    assert (info.value.h, info.value.j) == (0, 2)


@pytest.mark.parametrize("values, error", [
    (["1/2", "1/4"], NotUnitAtZero),
    (["1", "3/2"], NotAProbability),
    (["1", "-1/2"], NotAProbability),
    ([1, 0.5], MixedBackend),
    ([], SpecParseError),
    (["1", "abc"], SpecParseError),
])
def test_rejected_sequences(values, error):
    with pytest.raises(error):
        new_moment_sequence(values)


def test_float_backend_tolerates_rounding():
    ph = new_moment_sequence([1.0, 0.5, 1 / 3, 0.25])
    assert ph.backend == "float"


def test_decimal_strings_read_exactly():
    ph = new_moment_sequence(["1", "0.5", "0.25"])
    assert ph.values == (F(1), F(1, 2), F(1, 4))


def test_finite_differences(uniform):
    assert finite_difference(uniform, 1, 0) == F(1, 2)
    assert finite_difference(uniform, 2, 1) == F(1, 12)
    p = F(2, 7)
    assert finite_difference(constant_phenomenon(p).to_moments(6), 2, 0) == (1 - p) ** 2


def test_finite_difference_depth_contract():
    ph = new_moment_sequence(["1", "1/2", "1/3"])
    with pytest.raises(DepthExceeded) as info:
        finite_difference(ph, 2, 1)
    assert (info.value.needed, info.value.available) == (3, 2)
    with pytest.raises(IndexOutOfRange):
        finite_difference(ph, -1, 0)


def test_mixing_moment(uniform):
    assert mixing_moment(uniform, 3) == F(1, 4)
    assert mixing_moment(constant_phenomenon(F(1, 3)), 2) == F(1, 9)
    assert mixing_moment(uniform, 0) == 1


def test_difference_table_matches_direct_differences(random_sequences):
    ph = random_sequences[0]
    table = difference_table(ph, 8)
    for j in range(9):
        for h in range(9 - j):
            assert table[j][h] == finite_difference(ph, j, h)


def test_json_round_trip(uniform):
    data = uniform.to_dict()
    assert data["family"] == "uniform"
    again = phenomenon_from_dict(data)
    assert isinstance(again, MomentSequence)
    assert again.values == uniform.values
    assert again.family == "uniform"


def test_uniform_tag_needs_uniform_moments():
    with pytest.raises(SpecParseError):
        phenomenon_from_dict({"kind": "moments", "values": ["1", "1", "1"], "family": "uniform"})
    with pytest.raises(SpecParseError):
        phenomenon_from_dict({"kind": "moments", "values": ["1", "1/2", "1/4"], "family": "uniform"})


def test_uniform_tag_is_kept_when_it_fits():
    ph = phenomenon_from_dict({"kind": "moments", "values": ["1", "1/2", "1/3"], "family": "uniform"})
    assert ph.family == "uniform"
    assert limiting_cdf_exact(ph, "1/2") == F(1, 2)
    assert theorem1_interval(ph, "1/5", "1/2", 2).limit == F(3, 10)
    rounded = phenomenon_from_dict({"kind": "moments", "values": [1.0, 0.5, 1 / 3], "family": "uniform"})
    assert rounded.backend == "float"


def test_untagged_point_mass_has_no_uniform_limit():
    ph = phenomenon_from_dict({"kind": "moments", "values": ["1", "1", "1"]})
    assert ph.family is None
    assert theorem1_interval(ph, "1/5", "1/2", 2).limit is None


def test_float_differences_are_exact_for_the_uniform_family():
    table = difference_table(uniform_phenomenon(depth=50, backend="float"), 50)
    assert table[50][0] == pytest.approx(1 / 51)
    assert table[25][25] == pytest.approx(float(F(1, 51) / F(math.comb(50, 25))), rel=1e-12)
