import math

import numpy as np
import pytest

from hopdim import analytic, numerics
from hopdim.exceptions import PreconditionError, RangeError


NO_RESOLUTION_D100 = [199901, 29852, 12451, 7675, 5698, 4683, 4090, 3714, 3463, 3288, 3163, 3074, 3009, 2963, 2930,
                      2908, 2895, 2888, 2886, 2889, 2895, 2905, 2917, 2931, 2947]
SINGLE_RESOLUTION_D100 = [4406, 2020, 1453, 1233, 1129, 1076, 1050, 1039, 1037, 1042, 1052, 1064, 1078, 1095, 1112,
                          1130, 1150, 1169, 1189, 1210, 1231, 1252, 1273, 1294, 1315]


@pytest.mark.parametrize("n,d,n_ru,expected", [
    (1, 1, 4, 0.25),
    (2, 1, 4, 0.25),
    (1, 2, 4, 1 - 0.75 ** 2),
    (3, 0, 10, 0.0),
    (4, 5, 4, 1.0),
])
def test_failure_prob_no_resolution(n, d, n_ru, expected):
    assert analytic.failure_prob_no_resolution(n, d, n_ru) == pytest.approx(expected, rel=1e-14)


def test_failure_prob_no_resolution_reference():
    assert analytic.failure_prob_no_resolution(20, 100, 2886) == pytest.approx(9.9779e-7, rel=1e-4)


def test_failure_prob_no_resolution_monotone():
    in_n_ru = [analytic.failure_prob_no_resolution(10, 100, n_ru) for n_ru in range(500, 3000, 50)]
    in_d = [analytic.failure_prob_no_resolution(10, d, 1000) for d in range(1, 200, 5)]

    assert all(a > b for a, b in zip(in_n_ru, in_n_ru[1:]))
    assert all(a < b for a, b in zip(in_d, in_d[1:]))


@pytest.mark.parametrize("n,d,n_ru", [(1, 1, 4), (20, 100, 2886), (10, 1000, 50000), (26, 3, 26)])
def test_failure_prob_resolvable_reduces_to_no_resolution(n, d, n_ru):
    assert analytic.failure_prob_resolvable(n, d, n_ru, 0) == analytic.failure_prob_no_resolution(n, d, n_ru)


@pytest.mark.parametrize("n_ru,expected", [(1037, 9.945e-7), (1036, 1.008e-6), (1000, 1.659e-6)])
def test_failure_prob_single_resolution(n_ru, expected):
    assert analytic.failure_prob_resolvable(10, 100, n_ru, 1) == pytest.approx(expected, rel=1e-3)


def test_failure_prob_resolvable_matches_pmf_sum():
    n, d, n_ru = 6, 40, 300
    for ncmax in range(4):
        resolved = sum(analytic.collision_pmf(c, d, n, n_ru) for c in range(ncmax + 1))
        expected = (1.0 - resolved) ** n
        assert analytic.failure_prob_resolvable(n, d, n_ru, ncmax) == pytest.approx(expected, rel=1e-9)


def test_failure_prob_resolvable_decreasing_in_ncmax():
    values = [analytic.failure_prob_resolvable(10, 100, 1000, ncmax) for ncmax in range(6)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("d,ncmax", [(3, 3), (3, 5), (0, 0)])
def test_failure_prob_resolvable_saturated(d, ncmax):
    assert analytic.failure_prob_resolvable(2, d, 10, ncmax) == 0.0


def test_collision_pmf():
    assert analytic.collision_pmf(1, 2, 1, 4) == pytest.approx(0.375, rel=1e-14)
    assert sum(analytic.collision_pmf(c, 50, 10, 1000) for c in range(51)) == pytest.approx(1.0, rel=1e-12)
    assert math.isfinite(analytic.collision_pmf(3, 100_000, 10, 1_000_000))


@pytest.mark.parametrize("function,args", [
    (analytic.failure_prob_no_resolution, (5, 1, 4)),
    (analytic.failure_prob_no_resolution, (0, 1, 4)),
    (analytic.failure_prob_no_resolution, (1, -1, 4)),
    (analytic.failure_prob_resolvable, (1, 1, 4, -1)),
    (analytic.collision_pmf, (3, 2, 1, 4)),
    (analytic.required_ru_no_resolution, (2, 10, 0.0)),
    (analytic.required_ru_no_resolution, (2, 10, 1.0)),
    (analytic.required_ru_single_resolution, (0, 10, 1e-6)),
    (analytic.min_ru_no_resolution, (0, 1e-6)),
    (analytic.min_ru_single_resolution, (10, 1.5)),
])
def test_invalid_arguments(function, args):
    with pytest.raises(PreconditionError):
        function(*args)


@pytest.mark.parametrize("n,expected", zip(range(2, 27), NO_RESOLUTION_D100))
def test_required_ru_no_resolution(n, expected):
    assert analytic.required_ru_no_resolution(n, 100, 1e-6) == expected


def test_required_ru_no_resolution_small_case():
    assert analytic.required_ru_no_resolution(4, 10, 1e-2) == 108
    assert analytic.required_ru_no_resolution(19, 100, 1e-6) == 2888
    assert analytic.required_ru_no_resolution(3, 0, 1e-6) == 3


@pytest.mark.parametrize("n,expected", zip(range(2, 27), SINGLE_RESOLUTION_D100))
def test_required_ru_single_resolution(n, expected):
    assert analytic.required_ru_single_resolution(n, 100, 1e-6) == expected


@pytest.mark.parametrize("d", [50, 100, 200, 500, 1000])
def test_single_resolution_closed_form_at_optimum(d):
    closed_form = analytic.required_ru_single_resolution(10, d, 1e-6)
    assert abs(closed_form - numerics.invert_required_ru_numeric(10, d, 1e-6, 1)) <= 1


@pytest.mark.parametrize("d", [20, 100, 1000])
def test_single_resolution_closed_form_accuracy(d):
    for n in range(4, 16):
        reference = numerics.invert_required_ru_numeric(n, d, 1e-6, 1)
        assert abs(analytic.required_ru_single_resolution(n, d, 1e-6) - reference) <= 0.02 * reference


def test_required_ru_single_resolution_without_interferers():
    assert analytic.required_ru_single_resolution(7, 0, 1e-6) == 7


def test_optimal_reps_no_resolution():
    assert analytic.optimal_reps_no_resolution(1e-6) == pytest.approx(19.93, abs=5e-3)
    assert analytic.optimal_reps_no_resolution(0.5) == pytest.approx(1.0)


@pytest.mark.parametrize("d,expected", [
    (10, 298), (20, 586), (50, 1448), (100, 2886), (200, 5762), (500, 14388), (1000, 28766),
])
def test_min_ru_no_resolution(d, expected):
    assert analytic.min_ru_no_resolution(d, 1e-6) == expected


def test_min_ru_no_resolution_edges():
    assert analytic.min_ru_no_resolution(1, 0.5) == 2
    assert analytic.min_ru_no_resolution_linear(1, math.exp(-1.0)) == 3


@pytest.mark.parametrize("d,expected", [(10, 288), (100, 2876), (1000, 28756)])
def test_min_ru_no_resolution_linear(d, expected):
    assert analytic.min_ru_no_resolution_linear(d, 1e-6) == expected


def test_linear_form_gap():
    exact = analytic.min_ru_no_resolution(100, 1e-6)
    linear = analytic.min_ru_no_resolution_linear(100, 1e-6)
    assert abs(exact - linear) / exact < 0.01


def test_single_resolution_constants():
    constants = analytic.single_resolution_constants()

    assert constants.z_star == pytest.approx(-0.2798, abs=5e-5)
    assert constants.ru_constant == pytest.approx(0.7502, abs=5e-5)
    assert constants.reps_constant == pytest.approx(0.6995, abs=2e-4)
    assert analytic.linear_no_resolution_constant() == pytest.approx(2.0814, abs=5e-5)


@pytest.mark.parametrize("d,expected", [(10, 104), (100, 1037), (1000, 10365)])
def test_min_ru_single_resolution(d, expected):
    assert analytic.min_ru_single_resolution(d, 1e-6) == expected


def test_optimal_reps_single_resolution():
    assert analytic.optimal_reps_single_resolution(1e-6) == pytest.approx(9.666, abs=1e-2)


def test_resolution_gain():
    assert analytic.resolution_gain(1000, 1e-6) == pytest.approx(2.77, abs=0.01)


@pytest.mark.parametrize("value,expected", [
    (2.0000000000000004, 2), (2.1, 3), (7.0, 7), (1e-12, 1), (2886.0001, 2887), (1_000_000_000.4, 1_000_000_001),
    (123_456_789.1, 123_456_790), (2.0 ** 40 + 0.5, 2 ** 40 + 1),
])
def test_ceil_int(value, expected):
    assert analytic.ceil_int(value) == expected


def test_ceil_int_not_finite():
    with pytest.raises(RangeError):
        analytic.ceil_int(math.inf)


def random_scenarios(seed, count, max_n_ru=None):
    rng = np.random.default_rng(seed)
    scenarios = []
    for _ in range(count):
        n = int(rng.integers(1, 27))
        d = int(rng.integers(1, 1001))
        if max_n_ru is None:
            scenarios.append((n, d, float(10.0 ** rng.uniform(-9.0, -1.0))))
        else:
            scenarios.append((n, d, int(rng.integers(n, max_n_ru + 1))))
    return scenarios


@pytest.mark.parametrize("n,d,pf", random_scenarios(11, 200) + [(1, 1579, 2.26096e-10), (1, 1005, 3.2e-6)])
def test_required_ru_no_resolution_round_trip(n, d, pf):
    n_ru = analytic.required_ru_no_resolution(n, d, pf)

    assert analytic.failure_prob_no_resolution(n, d, n_ru) <= pf
    assert n_ru == n or analytic.failure_prob_no_resolution(n, d, n_ru - 1) > pf


def test_required_ru_no_resolution_large_count():
    assert analytic.required_ru_no_resolution(1, 1005, 3.2e-6) == numerics.invert_required_ru_numeric(1, 1005, 3.2e-6, 0)


@pytest.mark.parametrize("n,d,pf", random_scenarios(12, 200))
def test_numeric_inversion_matches_closed_form(n, d, pf):
    assert numerics.invert_required_ru_numeric(n, d, pf, 0) == analytic.required_ru_no_resolution(n, d, pf)


@pytest.mark.parametrize("n,d,n_ru", random_scenarios(13, 100, max_n_ru=10_000))
def test_failure_prob_resolvable_without_resolution_is_destructive_formula(n, d, n_ru):
    direct = (1.0 - (1.0 - n / n_ru) ** d) ** n

    assert analytic.failure_prob_resolvable(n, d, n_ru, 0) == analytic.failure_prob_no_resolution(n, d, n_ru)
    assert analytic.failure_prob_no_resolution(n, d, n_ru) == pytest.approx(direct, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("n,d,n_ru", random_scenarios(14, 100, max_n_ru=5_000))
def test_failure_prob_monotone(n, d, n_ru):
    values = [analytic.failure_prob_resolvable(n, d, n_ru, ncmax) for ncmax in range(4)]

    assert all(a >= b for a, b in zip(values, values[1:]))
    for ncmax in range(3):
        current = analytic.failure_prob_resolvable(n, d, n_ru, ncmax)
        assert analytic.failure_prob_resolvable(n, d, n_ru + 1, ncmax) <= current
        assert analytic.failure_prob_resolvable(n, d + 1, n_ru, ncmax) >= current


def test_repetition_loss_prob():
    assert analytic.repetition_loss_prob(1, 1, 4) == pytest.approx(0.25)
    assert analytic.repetition_loss_prob(10, 100, 1000, 1) ** 10 == pytest.approx(
        analytic.failure_prob_resolvable(10, 100, 1000, 1), rel=1e-12)
    assert analytic.repetition_loss_prob(3, 2, 10, 2) == 0.0
