import functools
import logging
import math
from dataclasses import dataclass

from scipy import special, stats

from hopdim import numerics
from hopdim.core import require
from hopdim.exceptions import DomainError, RangeError


logger = logging.getLogger(__name__)

# ceilings of values within this many ulps of an integer return that integer
_CEIL_ULPS: int = 4


@dataclass(frozen=True)
class SingleResolutionConstants:
    """
    Constants of the single-resolution optimum, derived from the maximiser of g(z).

    Attributes:
        z_star (float): Maximiser of g(z) = ln(1 + e z) (W-1(z) + 1), about -0.2798.
        g_star (float): g(z_star).
        ru_constant (float): 1 / g_star, about 0.7502 (minimum n_ru per d per ln(1/pf)).
        reps_constant (float): -1 / ln(1 + e z_star), about 0.6996 (optimal n per ln(1/pf)).
    """

    z_star: float
    g_star: float
    ru_constant: float
    reps_constant: float


def ceil_int(value: float) -> int:
    """
    Ceiling that ignores rounding noise around integers.

    Raises:
        RangeError: value is not finite.
    """
    if not math.isfinite(value):
        raise RangeError(f'Non-finite resource count {value}.')

    nearest: float = round(value)
    if abs(value - nearest) <= _CEIL_ULPS * math.ulp(nearest):
        return int(nearest)
    return math.ceil(value)


def _log1mexp(s: float) -> float:
    """
    log(1 - exp(s)) for s <= 0, accurate at both ends.
    """
    if s == 0.0:
        return -math.inf
    if s < -math.log(2.0):
        return math.log1p(-math.exp(s))
    return math.log(-math.expm1(s))


def _check_grid(n: int, d: int, n_ru: int) -> None:
    require(n >= 1, 'n', n, 'n >= 1')
    require(d >= 0, 'd', d, 'd >= 0')
    require(n <= n_ru, 'n', n, f'n <= n_ru = {n_ru}')


def _check_target(pf_target: float) -> None:
    require(0.0 < pf_target < 1.0, 'pf_target', pf_target, '0 < pf_target < 1')


def log_repetition_loss(n: int, d: int, n_ru: int, ncmax: int = 0) -> float:
    """
    Log probability that one repetition meets more than ncmax interferers.

    The number of interferers on a repetition is binomial with d trials and
    rate n / n_ru, the loss is its survival function at ncmax.

    Args:
        n (int): Packet repetitions.
        d (int): Interfering devices.
        n_ru (int): Resource units.
        ncmax (int): Maximum resolvable collisions.

    Returns:
        float: The log probability, -inf when a loss is impossible.
    """
    _check_grid(n, d, n_ru)
    require(ncmax >= 0, 'ncmax', ncmax, 'ncmax >= 0')

    if d == 0 or ncmax >= d:
        return -math.inf
    if n == n_ru:
        return 0.0

    rate: float = n / n_ru
    if ncmax == 0:
        return _log1mexp(d * math.log1p(-rate))
    return float(stats.binom.logsf(ncmax, d, rate))


def repetition_loss_prob(n: int, d: int, n_ru: int, ncmax: int = 0) -> float:
    """
    Probability that one repetition is lost, see log_repetition_loss.
    """
    return math.exp(log_repetition_loss(n, d, n_ru, ncmax))


def failure_prob_no_resolution(n: int, d: int, n_ru: int) -> float:
    """
    Failure probability when every collision destroys the repetition.

    (1 - (1 - n / n_ru)^d)^n, evaluated in the log domain.

    Args:
        n (int): Packet repetitions, 1 <= n <= n_ru.
        d (int): Interfering devices, d >= 0.
        n_ru (int): Resource units.

    Returns:
        float: The failure probability, 0 when d = 0.
    """
    return failure_prob_resolvable(n, d, n_ru, 0)


def failure_prob_resolvable(n: int, d: int, n_ru: int, ncmax: int) -> float:
    """
    Failure probability when the receiver resolves up to ncmax collisions per repetition.

    (1 - sum_{c <= ncmax} P(N_c = c))^n, evaluated in the log domain.

    Args:
        n (int): Packet repetitions, 1 <= n <= n_ru.
        d (int): Interfering devices, d >= 0.
        n_ru (int): Resource units.
        ncmax (int): Maximum resolvable collisions, ncmax >= 0.

    Returns:
        float: The failure probability, 0 when ncmax >= d.
    """
    log_loss: float = log_repetition_loss(n, d, n_ru, ncmax)
    if log_loss == -math.inf:
        return 0.0
    return math.exp(n * log_loss)


def collision_pmf(c: int, d: int, n: int, n_ru: int) -> float:
    """
    Probability that exactly c of the d interferers hit a given repetition.

    Binomial pmf with rate n / n_ru, through log-gamma so large d stays finite.

    Args:
        c (int): Collisions, 0 <= c <= d.
        d (int): Interfering devices.
        n (int): Packet repetitions.
        n_ru (int): Resource units.

    Returns:
        float: The probability.
    """
    require(d >= 0, 'd', d, 'd >= 0')
    require(0 <= c <= d, 'c', c, f'0 <= c <= d = {d}')
    _check_grid(n, d, n_ru)

    rate: float = n / n_ru
    log_pmf: float = (special.gammaln(d + 1) - special.gammaln(c + 1) - special.gammaln(d - c + 1)
                      + special.xlogy(c, rate) + special.xlog1py(d - c, -rate))
    return float(math.exp(log_pmf))


def required_ru_no_resolution(n: int, d: int, pf_target: float) -> int:
    """
    Resource units needed with n repetitions when collisions are destructive.

    ceil(n / (1 - (1 - pf^(1/n))^(1/d))), with d = 0 needing only n units.

    Args:
        n (int): Packet repetitions.
        d (int): Interfering devices.
        pf_target (float): Target failure probability.

    Returns:
        int: The resource units.

    Raises:
        RangeError: The result overflows.
    """
    require(n >= 1, 'n', n, 'n >= 1')
    require(d >= 0, 'd', d, 'd >= 0')
    _check_target(pf_target)

    if d == 0:
        return n

    # per repetition loss allowed by the target
    loss: float = math.exp(math.log(pf_target) / n)
    free: float = -math.expm1(math.log1p(-loss) / d)
    if free <= 0.0:
        raise RangeError(f'Resource count overflows for n={n}, d={d}, pf_target={pf_target}.')

    n_ru: int = max(n, ceil_int(n / free))

    # the closed form is exact up to rounding, settle the last unit on the failure probability itself
    while failure_prob_no_resolution(n, d, n_ru) > pf_target:
        n_ru += 1
    while n_ru > n and failure_prob_no_resolution(n, d, n_ru - 1) <= pf_target:
        n_ru -= 1

    return n_ru


def optimal_reps_no_resolution(pf_target: float) -> float:
    """
    Continuous repetition count minimising the destructive-collision resource need.

    -ln(pf) / ln(2), independent of the number of interferers.
    """
    _check_target(pf_target)
    return -math.log(pf_target) / math.log(2.0)


def min_ru_no_resolution(d: int, pf_target: float) -> int:
    """
    Minimum resource units over n when collisions are destructive.

    ceil(ln(pf) / (((1/2)^(1/d) - 1) ln 2)).
    """
    require(d >= 1, 'd', d, 'd >= 1')
    _check_target(pf_target)
    return ceil_int(math.log(pf_target) / (math.expm1(-math.log(2.0) / d) * math.log(2.0)))


def linear_no_resolution_constant() -> float:
    """
    1 / ln^2(2), about 2.0814.
    """
    return 1.0 / math.log(2.0) ** 2


def min_ru_no_resolution_linear(d: int, pf_target: float) -> int:
    """
    Large-d linear form of the destructive-collision minimum, ceil(d ln(1/pf) / ln^2(2)).
    """
    require(d >= 1, 'd', d, 'd >= 1')
    _check_target(pf_target)
    return ceil_int(-linear_no_resolution_constant() * d * math.log(pf_target))


def required_ru_single_resolution(n: int, d: int, pf_target: float) -> int:
    """
    Resource units needed with n repetitions when one collision is resolvable.

    Large-d closed form ceil(-n d / (W-1((pf^(1/n) - 1) / e) + 1)). The argument
    of W-1 lies in (-1/e, 0) for every valid target, so W-1 < -1.

    Args:
        n (int): Packet repetitions.
        d (int): Interfering devices.
        pf_target (float): Target failure probability.

    Returns:
        int: The resource units, n when d = 0.

    Raises:
        DomainError: The W-1 argument falls outside [-1/e, 0).
        RangeError: The result overflows.
    """
    require(n >= 1, 'n', n, 'n >= 1')
    require(d >= 0, 'd', d, 'd >= 0')
    _check_target(pf_target)

    if d == 0:
        return n

    argument: float = math.expm1(math.log(pf_target) / n) / math.e
    if not numerics.BRANCH_POINT <= argument < 0.0:
        raise DomainError(name='argument', value=argument, bound='-1/e <= (pf^(1/n) - 1) / e < 0')

    denominator: float = numerics.lambert_wm1(argument) + 1.0
    if denominator == 0.0:
        raise RangeError(f'Resource count overflows for n={n}, d={d}, pf_target={pf_target}.')

    return max(n, ceil_int(-n * d / denominator))


@functools.cache
def single_resolution_constants() -> SingleResolutionConstants:
    """
    Derives the single-resolution constants from the numeric maximiser of g(z).
    """
    z_star, g_star = numerics.maximize_g()
    constants = SingleResolutionConstants(
        z_star=z_star,
        g_star=g_star,
        ru_constant=1.0 / g_star,
        reps_constant=-1.0 / math.log1p(math.e * z_star)
    )
    logger.debug(f'single resolution constants: {constants}')
    return constants


def optimal_reps_single_resolution(pf_target: float) -> float:
    """
    Continuous repetition count minimising the single-resolution resource need.

    About -0.6996 ln(pf), independent of the number of interferers.
    """
    _check_target(pf_target)
    return -single_resolution_constants().reps_constant * math.log(pf_target)


def min_ru_single_resolution(d: int, pf_target: float) -> int:
    """
    Minimum resource units over n when one collision is resolvable.

    About ceil(0.7502 d ln(1/pf)).
    """
    require(d >= 1, 'd', d, 'd >= 1')
    _check_target(pf_target)
    return ceil_int(-single_resolution_constants().ru_constant * d * math.log(pf_target))


def resolution_gain(d: int, pf_target: float) -> float:
    """
    Ratio of the destructive-collision to the single-resolution minimum, about 2.77.
    """
    return min_ru_no_resolution_linear(d, pf_target) / min_ru_single_resolution(d, pf_target)
