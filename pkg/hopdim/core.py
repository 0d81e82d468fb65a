import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional, Tuple

import numpy as np
from scipy import stats

from hopdim.config import SampleMode
from hopdim.exceptions import InfeasibleFactorizationError, PreconditionError


logger = logging.getLogger(__name__)


def require(condition: bool, name: str, value, bound: str) -> None:
    """
    Raises a PreconditionError naming the violated bound when condition is false.
    """
    if not condition:
        raise PreconditionError(name=name, value=value, bound=bound)


class Method(Enum):
    """
    Method that produced a dimensioning result, its value is the tag used in outputs.
    """

    CLOSED_FORM = 'closed_form'
    NUMERIC_INVERSION = 'numeric'
    MONTE_CARLO = 'montecarlo'
    LINEAR_APPROX = 'linear_approx'


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Scenario seen by the target device.

    Attributes:
        d (int): Number of interfering devices.
        n (int): Packet repetitions per frame.
        pf_target (float): Target failure probability, in (0, 1).
        ncmax (int): Maximum number of collisions the receiver resolves on a resource unit.
    """

    d: int
    n: int
    pf_target: float
    ncmax: int = 0

    def __post_init__(self) -> None:
        require(self.d >= 0, 'd', self.d, 'd >= 0')
        require(self.n >= 1, 'n', self.n, 'n >= 1')
        require(0.0 < self.pf_target < 1.0, 'pf_target', self.pf_target, '0 < pf_target < 1')
        require(self.ncmax >= 0, 'ncmax', self.ncmax, 'ncmax >= 0')


@dataclass(frozen=True)
class ResourceGrid:
    """
    Frame of p frequency channels by q time slots.

    Attributes:
        p (int): Frequency channels.
        q (int): Time slots.
        n_ru (int): Resource units, always p * q.
    """

    p: int
    q: int
    n_ru: int = field(init=False)

    def __post_init__(self) -> None:
        require(self.p >= 1, 'p', self.p, 'p >= 1')
        require(self.q >= 1, 'q', self.q, 'q >= 1')
        object.__setattr__(self, 'n_ru', self.p * self.q)

    @property
    def latin_capacity(self) -> int:
        """
        Largest repetition count a latin pattern fits in.
        """
        return min(self.p, self.q)

    @classmethod
    def from_n_ru(cls, n_ru: int, n: int, mode: SampleMode = SampleMode.LATIN) -> 'ResourceGrid':
        """
        Builds a grid with n_ru resource units.

        Latin mode uses the balanced latin-feasible split, Uniform mode keeps
        every unit on a single time slot because its patterns ignore the shape.

        Raises:
            InfeasibleFactorizationError: Latin mode and no feasible split exists.
        """
        if mode is SampleMode.LATIN:
            p, q = balanced_factorization(n_ru, n)
            return cls(p=p, q=q)

        require(n_ru >= n, 'n_ru', n_ru, f'n_ru >= n = {n}')
        return cls(p=n_ru, q=1)


@dataclass(frozen=True)
class HopPattern:
    """
    Resource units used by one device in one frame.

    Attributes:
        cells (FrozenSet[Tuple[int, int]]): (channel, slot) pairs.
        grid (ResourceGrid): The grid the cells belong to.
    """

    cells: FrozenSet[Tuple[int, int]]
    grid: ResourceGrid

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def flat(self) -> Tuple[int, ...]:
        """
        Canonical encoding, sorted flat indices channel * q + slot.
        """
        return tuple(sorted(channel * self.grid.q + slot for channel, slot in self.cells))

    @property
    def is_latin(self) -> bool:
        channels = {channel for channel, _ in self.cells}
        slots = {slot for _, slot in self.cells}
        return len(channels) == len(self.cells) and len(slots) == len(self.cells)

    @classmethod
    def from_flat(cls, flat, grid: ResourceGrid) -> 'HopPattern':
        return cls(cells=frozenset((int(i) // grid.q, int(i) % grid.q) for i in flat), grid=grid)


@dataclass(frozen=True)
class FailureEstimate:
    """
    Empirical failure probability with its 95% Wilson interval.

    Attributes:
        failures (int): Failed frames.
        samples (int): Simulated frames.
        p_hat (float): failures / samples.
        ci_low (float): Lower end of the interval.
        ci_high (float): Upper end of the interval.
        seed (int): Master seed of the run.
    """

    failures: int
    samples: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int

    @classmethod
    def from_counts(cls, failures: int, samples: int, seed: int) -> 'FailureEstimate':
        require(samples >= 1, 'samples', samples, 'samples >= 1')
        require(0 <= failures <= samples, 'failures', failures, f'0 <= failures <= samples = {samples}')
        ci_low, ci_high = wilson_interval(failures, samples)
        return cls(failures=failures, samples=samples, p_hat=failures / samples,
                   ci_low=ci_low, ci_high=ci_high, seed=seed)

    @property
    def sigma(self) -> float:
        """
        Binomial standard error of p_hat.
        """
        return math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.samples)


@dataclass(frozen=True)
class DimensioningResult:
    """
    Repetition count and resource units produced by one method.

    Attributes:
        n (int): Packet repetitions.
        n_ru (int): Resource units.
        method (Method): The method that produced n_ru.
        pf_achieved (Optional[float]): Failure probability at (n, n_ru), when known.
        estimate (Optional[FailureEstimate]): Empirical estimate, Monte-Carlo results only.
        skipped (Tuple[int, ...]): Candidates left out of a Monte-Carlo scan for lack of a latin split.
    """

    n: int
    n_ru: int
    method: Method
    pf_achieved: Optional[float] = None
    estimate: Optional[FailureEstimate] = None
    skipped: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        require(self.n >= 1, 'n', self.n, 'n >= 1')
        require(self.n_ru >= self.n, 'n_ru', self.n_ru, f'n_ru >= n = {self.n}')


def wilson_interval(failures: int, samples: int, confidence: float = 0.95) -> Tuple[float, float]:
    """
    Wilson score interval of a binomial proportion.

    Args:
        failures (int): Observed successes of the counted event.
        samples (int): Trials.
        confidence (float): Two-sided confidence level.

    Returns:
        Tuple[float, float]: (low, high), clipped to [0, 1] and always bracketing failures / samples.
    """
    z: float = float(stats.norm.ppf(0.5 + confidence / 2.0))
    p_hat: float = failures / samples
    z2n: float = z * z / samples
    centre: float = (p_hat + z2n / 2.0) / (1.0 + z2n)
    half: float = z * math.sqrt(p_hat * (1.0 - p_hat) / samples + z2n / (4.0 * samples)) / (1.0 + z2n)
    return min(max(0.0, centre - half), p_hat), max(min(1.0, centre + half), p_hat)


def balanced_factorization(n_ru: int, n: int) -> Tuple[int, int]:
    """
    Most balanced split n_ru = p * q with p >= n and q >= n, ties broken by p >= q.

    The most balanced divisor pair has the largest smaller factor, so it is
    either feasible or no pair is.

    Args:
        n_ru (int): Resource units.
        n (int): Repetitions that must fit in a latin pattern.

    Returns:
        Tuple[int, int]: (p, q) with p >= q.

    Raises:
        InfeasibleFactorizationError: No divisor pair has both factors at least n.
    """
    require(n_ru >= 1, 'n_ru', n_ru, 'n_ru >= 1')
    require(n >= 1, 'n', n, 'n >= 1')

    for q in range(math.isqrt(n_ru), 0, -1):
        if n_ru % q == 0:
            if q >= n:
                return n_ru // q, q
            break

    raise InfeasibleFactorizationError(n_ru=n_ru, n=n)


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """
    Counter-based random stream derived from (master_seed, key).

    The stream is a Philox4x64 generator keyed by a SeedSequence whose spawn
    key is the given integers, so any substream can be rebuilt on its own.

    Args:
        master_seed (int): Non-negative 64-bit master seed.
        *key (int): Path of the substream, e.g. (tag, block_index).

    Returns:
        np.random.Generator: The substream.
    """
    require(master_seed >= 0, 'master_seed', master_seed, 'master_seed >= 0')
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=tuple(key))))


def _distinct_tuples(rng: np.random.Generator, population: int, k: int, size: int) -> np.ndarray:
    """
    Uniform ordered k-tuples of distinct integers in [0, population), one per row.
    """
    if k * k > population:
        # Floyd's subset draw, then a uniform order within each row
        chosen: np.ndarray = np.empty((size, k), dtype=np.int64)
        for i, top in enumerate(range(population - k, population)):
            pick: np.ndarray = rng.integers(0, top + 1, size=size)
            taken: np.ndarray = (chosen[:, :i] == pick[:, None]).any(axis=1)
            chosen[:, i] = np.where(taken, top, pick)
        return rng.permuted(chosen, axis=1)

    draws: np.ndarray = rng.integers(0, population, size=(size, k))
    while True:
        ordered: np.ndarray = np.sort(draws, axis=1)
        clash: np.ndarray = np.any(ordered[:, 1:] == ordered[:, :-1], axis=1)
        if not clash.any():
            return draws
        draws[clash] = rng.integers(0, population, size=(int(clash.sum()), k))


def check_pattern_fits(grid: ResourceGrid, n: int, mode: SampleMode) -> None:
    """
    Raises a PreconditionError when n repetitions do not fit the grid in the given mode.
    """
    require(n >= 1, 'n', n, 'n >= 1')
    if mode is SampleMode.LATIN:
        require(n <= grid.latin_capacity, 'n', n, f'n <= min(p, q) = {grid.latin_capacity} in latin mode')
    else:
        require(n <= grid.n_ru, 'n', n, f'n <= n_ru = {grid.n_ru} in uniform mode')


def sample_flat_patterns(grid: ResourceGrid, n: int, mode: SampleMode, rng: np.random.Generator,
                         size: int) -> np.ndarray:
    """
    Draws size independent patterns as flat indices channel * q + slot.

    Uniform patterns are uniform over the n-subsets of the grid. Latin patterns
    pair a uniform ordered tuple of distinct channels with a uniform ordered
    tuple of distinct slots, which is uniform over distinct-row distinct-column
    patterns.

    Args:
        grid (ResourceGrid): The frame.
        n (int): Repetitions per pattern.
        mode (SampleMode): Sampling mode.
        rng (np.random.Generator): The stream to draw from.
        size (int): Number of patterns.

    Returns:
        np.ndarray: int64 array of shape (size, n), cells unordered within a row.
    """
    check_pattern_fits(grid, n, mode)

    if mode is SampleMode.LATIN:
        channels: np.ndarray = _distinct_tuples(rng, grid.p, n, size)
        slots: np.ndarray = _distinct_tuples(rng, grid.q, n, size)
        return (channels * grid.q + slots).astype(np.int64)

    return _distinct_tuples(rng, grid.n_ru, n, size).astype(np.int64)


def sample_pattern(grid: ResourceGrid, n: int, mode: SampleMode, rng: np.random.Generator) -> HopPattern:
    """
    Draws the pattern of one device in one frame.

    Args:
        grid (ResourceGrid): The frame.
        n (int): Repetitions.
        mode (SampleMode): Latin or Uniform.
        rng (np.random.Generator): The stream to draw from.

    Returns:
        HopPattern: A pattern satisfying the mode invariants.

    Raises:
        PreconditionError: n is too large for the grid in this mode.
    """
    return HopPattern.from_flat(sample_flat_patterns(grid, n, mode, rng, size=1)[0], grid)
