import bisect
import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Tuple

from scipy import optimize

from hopdim import analytic, config
from hopdim.core import require
from hopdim.exceptions import ConvergenceError, DomainError, RangeError


logger = logging.getLogger(__name__)

# -1/e, where both real branches of W meet at W = -1
BRANCH_POINT: float = -math.exp(-1.0)

# inputs this close to the branch point are the branch point
_BRANCH_SLACK: float = 4.0 * 2.0 ** -52 * math.exp(-1.0)

# a Halley step below this relative size, or a residual below this fraction of |x|, ends the iteration
_STEP_TOLERANCE: float = 2.0 ** -50
_RESIDUAL_FLOOR: float = 2.0 ** -50

# integer searches give up beyond this bound
SEARCH_LIMIT: int = 2 ** 62


def _halley(x: float, w: float) -> float:
    """
    Refines w towards w * exp(w) = x with Halley's method.

    Stops once the residual reaches rounding level or the step becomes negligible.

    Raises:
        ConvergenceError: Neither happened within the iteration cap.
    """
    for iteration in range(config.MAX_HALLEY_ITERATIONS):
        ew: float = math.exp(w)
        f: float = w * ew - x
        w1: float = w + 1.0
        if abs(f) <= _RESIDUAL_FLOOR * abs(x) or w1 == 0.0:
            return w
        dw: float = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw

        if abs(dw) <= _STEP_TOLERANCE * (1.0 + abs(w)):
            logger.debug(f'W({x}) = {w} after {iteration + 1} Halley steps')
            return w

    raise ConvergenceError(f'Halley iteration for W({x}) did not converge in {config.MAX_HALLEY_ITERATIONS} steps.')


def _branch_series(x: float, sign: float) -> float:
    """
    Series of W around the branch point, sign +1 for W0 and -1 for W-1.
    """
    p: float = sign * math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def lambert_w0(x: float) -> float:
    """
    Principal branch of the Lambert W function, W0(x) >= -1.

    Initial guess: series around the branch point for x < -0.25, log1p(x) up to
    x = 3, asymptotic ln(x) - ln(ln(x)) + ln(ln(x)) / ln(x) above. Halley
    refinement follows.

    Args:
        x (float): Argument, x >= -1/e.

    Returns:
        float: w with w * exp(w) = x.

    Raises:
        DomainError: x < -1/e.
        ConvergenceError: Halley iteration cap reached.
    """
    if math.isnan(x) or x < BRANCH_POINT - _BRANCH_SLACK:
        raise DomainError(name='x', value=x, bound='x >= -1/e for the principal branch')
    if x <= BRANCH_POINT + _BRANCH_SLACK:
        return -1.0
    if x == 0.0:
        return 0.0

    if x < -0.25:
        w: float = _branch_series(x, 1.0)
    elif x <= 3.0:
        w = math.log1p(x)
    else:
        l1: float = math.log(x)
        l2: float = math.log(l1)
        w = l1 - l2 + l2 / l1

    return _halley(x, w)


def lambert_wm1(x: float) -> float:
    """
    Negative branch of the Lambert W function, W-1(x) <= -1.

    Initial guess: series around the branch point for x < -0.25, asymptotic
    ln(-x) - ln(-ln(-x)) + ln(-ln(-x)) / ln(-x) towards 0-. Halley refinement follows.

    Args:
        x (float): Argument, -1/e <= x < 0.

    Returns:
        float: w <= -1 with w * exp(w) = x.

    Raises:
        DomainError: x outside [-1/e, 0).
        ConvergenceError: Halley iteration cap reached.
    """
    if math.isnan(x) or x < BRANCH_POINT - _BRANCH_SLACK or x >= 0.0:
        raise DomainError(name='x', value=x, bound='-1/e <= x < 0 for the negative branch')
    if x <= BRANCH_POINT + _BRANCH_SLACK:
        return -1.0

    if x < -0.25:
        w: float = _branch_series(x, -1.0)
    else:
        l1: float = math.log(-x)
        l2: float = math.log(-l1)
        w = l1 - l2 + l2 / l1

    return min(_halley(x, w), -1.0)


@dataclass(frozen=True)
class BracketedSearchSpec:
    """
    Inclusive integer bracket of a monotone predicate.

    Attributes:
        lo (int): Lower end, predicate(lo) is false.
        hi (int): Upper end, predicate(hi) is true.
        predicate (Callable[[int], bool]): Monotone predicate, false then true.
    """

    lo: int
    hi: int
    predicate: Callable[[int], bool]

    def solve(self) -> int:
        """
        Smallest integer in (lo, hi] where the predicate holds.

        Raises:
            ConvergenceError: The bracket ends do not straddle the boundary.
        """
        if self.predicate(self.lo) or not self.predicate(self.hi):
            raise ConvergenceError(f'Non-monotone bracket [{self.lo}, {self.hi}].')

        index: int = bisect.bisect_left(range(self.lo, self.hi + 1), True, key=self.predicate)
        logger.debug(f'bisection in [{self.lo}, {self.hi}] ended at {self.lo + index}')
        return self.lo + index


def bisect_min_integer(predicate: Callable[[int], bool], lo: int, limit: int = SEARCH_LIMIT) -> int:
    """
    Smallest integer >= lo where a monotone predicate holds.

    The bracket grows from lo with doubling steps until the predicate holds,
    integer bisection then finds the boundary.

    Args:
        predicate (Callable[[int], bool]): Monotone predicate, false then true.
        lo (int): Start of the search.
        limit (int): Largest integer tried.

    Returns:
        int: The boundary.

    Raises:
        RangeError: The predicate is still false at limit.
    """
    if predicate(lo):
        return lo

    step: int = 1
    hi: int = lo + step
    while not predicate(hi):
        if hi >= limit:
            raise RangeError(f'Search from {lo} found no passing value below {limit}.')
        lo = hi
        step *= 2
        hi = min(lo + step, limit)

    return BracketedSearchSpec(lo=lo, hi=hi, predicate=predicate).solve()


def invert_required_ru_numeric(n: int, d: int, pf_target: float, ncmax: int) -> int:
    """
    Smallest n_ru >= n whose failure probability meets the target, for any ncmax.

    Args:
        n (int): Packet repetitions.
        d (int): Interfering devices.
        pf_target (float): Target failure probability.
        ncmax (int): Maximum resolvable collisions.

    Returns:
        int: The resource units.
    """
    require(n >= 1, 'n', n, 'n >= 1')
    require(d >= 0, 'd', d, 'd >= 0')
    require(0.0 < pf_target < 1.0, 'pf_target', pf_target, '0 < pf_target < 1')
    require(ncmax >= 0, 'ncmax', ncmax, 'ncmax >= 0')

    return bisect_min_integer(
        lambda n_ru: analytic.failure_prob_resolvable(n, d, n_ru, ncmax) <= pf_target,
        lo=n
    )


def g(z: float) -> float:
    """
    ln(1 + e z) (W-1(z) + 1), the denominator maximised by the single-resolution optimum.
    """
    return math.log1p(math.e * z) * (lambert_wm1(z) + 1.0)


@functools.cache
def maximize_g() -> Tuple[float, float]:
    """
    Maximiser of g(z) on (-1/e, 0).

    Bounded Brent search (golden section with parabolic steps) on -g.

    Returns:
        Tuple[float, float]: (z_star, g_star), z_star close to -0.2798.
    """
    result = optimize.minimize_scalar(
        lambda z: -g(z),
        bounds=(BRANCH_POINT + 1e-9, -1e-9),
        method='bounded',
        options={'xatol': config.MAXIMIZE_XATOL, 'maxiter': 1000}
    )
    if not result.success:
        raise ConvergenceError(f'Maximisation of g(z) failed: {result.message}')

    z_star: float = float(result.x)
    logger.debug(f'g(z) maximised at z={z_star} after {result.nfev} evaluations')
    return z_star, g(z_star)


def optimal_reps_numeric(d: int, pf_target: float, ncmax: int) -> Tuple[int, int]:
    """
    Integer repetition count minimising the numerically inverted resource units.

    Scans n = 1 ... max(2 * ceil(-ln(pf) / ln 2), 30), ties go to the smaller n.

    Args:
        d (int): Interfering devices, d >= 1.
        pf_target (float): Target failure probability.
        ncmax (int): Maximum resolvable collisions.

    Returns:
        Tuple[int, int]: (n_star, n_ru_min).
    """
    require(d >= 1, 'd', d, 'd >= 1')
    require(0.0 < pf_target < 1.0, 'pf_target', pf_target, '0 < pf_target < 1')

    n_hi: int = max(2 * math.ceil(-math.log(pf_target) / math.log(2.0)), 30)
    n_ru_min, n_star = min((invert_required_ru_numeric(n, d, pf_target, ncmax), n) for n in range(1, n_hi + 1))
    logger.info(f'optimum for d={d}, pf={pf_target}, ncmax={ncmax}: n={n_star}, n_ru={n_ru_min}')
    return n_star, n_ru_min
