import math

import numpy as np
import pytest
from scipy import special

from hopdim import analytic, config, numerics
from hopdim.exceptions import ConvergenceError, DomainError, PreconditionError, RangeError


W0_POINTS = [-math.exp(-1.0) + 1e-12, -0.3, -0.1, -1e-8, 1e-300, 1e-8, 0.5, 1.0, math.e, 3.0, 10.0, 1e5, 1e50, 1e100]
WM1_POINTS = [-math.exp(-1.0) + 1e-12, -0.36, -0.3, -0.25, -0.2, -0.1, -1e-2, -1e-5, -1e-10, -1e-50, -1e-100]


@pytest.mark.parametrize("x", W0_POINTS)
def test_lambert_w0(x):
    w = numerics.lambert_w0(x)
    assert w >= -1.0
    assert w * math.exp(w) == pytest.approx(x, rel=1e-12)
    assert w == pytest.approx(special.lambertw(x, 0).real, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("x", WM1_POINTS)
def test_lambert_wm1(x):
    w = numerics.lambert_wm1(x)
    assert w <= -1.0
    assert w * math.exp(w) == pytest.approx(x, rel=1e-12)
    assert w == pytest.approx(special.lambertw(x, -1).real, rel=1e-9)


def test_lambert_wm1_reference_value():
    assert numerics.lambert_wm1(-0.1) == pytest.approx(-3.577152064, abs=1e-6)


def test_lambert_w_special_points():
    assert numerics.lambert_w0(0.0) == 0.0
    assert numerics.lambert_w0(math.e) == pytest.approx(1.0, rel=1e-14)
    assert numerics.lambert_w0(numerics.BRANCH_POINT) == -1.0
    assert numerics.lambert_wm1(numerics.BRANCH_POINT) == -1.0


@pytest.mark.parametrize("function,x", [
    (numerics.lambert_w0, -0.5),
    (numerics.lambert_w0, math.nan),
    (numerics.lambert_wm1, -0.5),
    (numerics.lambert_wm1, 0.0),
    (numerics.lambert_wm1, 0.1),
])
def test_lambert_w_domain(function, x):
    with pytest.raises(DomainError):
        function(x)


def test_lambert_w_domain_error_is_precondition():
    with pytest.raises(PreconditionError):
        numerics.lambert_wm1(1.0)


def test_halley_iteration_cap(mocker):
    mocker.patch.object(config, 'MAX_HALLEY_ITERATIONS', 0)

    with pytest.raises(ConvergenceError):
        numerics.lambert_w0(1.0)


@pytest.mark.parametrize("predicate,lo,expected", [
    (lambda x: x * x >= 1000, 0, 32),
    (lambda x: x >= 5, 5, 5),
    (lambda x: x >= 5, 9, 9),
    (lambda x: x >= 10 ** 12, 1, 10 ** 12),
    (lambda x: True, -3, -3),
])
def test_bisect_min_integer(predicate, lo, expected):
    assert numerics.bisect_min_integer(predicate, lo) == expected


def test_bisect_min_integer_call_count(mocker):
    predicate = mocker.Mock(side_effect=lambda x: x >= 700_000)

    assert numerics.bisect_min_integer(predicate, 0) == 700_000
    assert predicate.call_count < 3 * math.log2(700_000)


def test_bisect_min_integer_limit():
    with pytest.raises(RangeError):
        numerics.bisect_min_integer(lambda x: False, 0, limit=100)


def test_bracketed_search_spec():
    assert numerics.BracketedSearchSpec(lo=0, hi=100, predicate=lambda x: x >= 42).solve() == 42

    with pytest.raises(ConvergenceError):
        numerics.BracketedSearchSpec(lo=0, hi=10, predicate=lambda x: True).solve()

    with pytest.raises(ConvergenceError):
        numerics.BracketedSearchSpec(lo=0, hi=10, predicate=lambda x: False).solve()


@pytest.mark.parametrize("n", range(2, 27))
def test_invert_matches_closed_form_without_resolution(n):
    assert (numerics.invert_required_ru_numeric(n, 100, 1e-6, 0)
            == analytic.required_ru_no_resolution(n, 100, 1e-6))


@pytest.mark.parametrize("n,ncmax,expected", [
    (20, 0, 2886),
    (10, 1, 1037),
    (2, 1, 4385),
    (6, 2, 542),
    (5, 3, 336),
    (26, 3, 637),
])
def test_invert_required_ru_numeric(n, ncmax, expected):
    n_ru = numerics.invert_required_ru_numeric(n, 100, 1e-6, ncmax)

    assert n_ru == expected
    assert analytic.failure_prob_resolvable(n, 100, n_ru, ncmax) <= 1e-6
    assert analytic.failure_prob_resolvable(n, 100, n_ru - 1, ncmax) > 1e-6


def test_invert_required_ru_numeric_without_interferers():
    assert numerics.invert_required_ru_numeric(4, 0, 1e-6, 0) == 4
    assert numerics.invert_required_ru_numeric(4, 2, 1e-6, 2) == 4


def test_maximize_g():
    z_star, g_star = numerics.maximize_g()

    assert z_star == pytest.approx(-0.2797793420, abs=1e-6)
    assert g_star == pytest.approx(1.3330081564, abs=1e-8)
    assert all(numerics.g(z) < g_star for z in np.linspace(-0.36, -0.01, 50))


@pytest.mark.parametrize("d,ncmax,expected", [
    (100, 0, (20, 2886)),
    (100, 1, (10, 1037)),
    (100, 2, (6, 542)),
    (100, 3, (5, 336)),
    (1000, 0, (20, 28766)),
    (1000, 1, (10, 10368)),
    (1000, 2, (6, 5442)),
    (1000, 3, (5, 3377)),
])
def test_optimal_reps_numeric(d, ncmax, expected):
    assert numerics.optimal_reps_numeric(d, 1e-6, ncmax) == expected


@pytest.mark.parametrize("y", [-1.5, -2.0, -5.0, -10.0])
def test_lambert_wm1_round_trip(y):
    assert numerics.lambert_wm1(y * math.exp(y)) == pytest.approx(y, abs=1e-10)


def test_maximize_g_local_maximum():
    z_star, g_star = numerics.maximize_g()
    assert g_star >= numerics.g(z_star - 1e-3)
    assert g_star >= numerics.g(z_star + 1e-3)


@pytest.mark.parametrize("ncmax,continuous", [
    (0, analytic.optimal_reps_no_resolution),
    (1, analytic.optimal_reps_single_resolution),
])
def test_optimal_reps_numeric_near_continuous_optimum(ncmax, continuous):
    n_star, _ = numerics.optimal_reps_numeric(100, 1e-6, ncmax)
    assert abs(n_star - continuous(1e-6)) <= 1
