import itertools
import logging
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from hopdim import config, numerics
from hopdim.config import SampleMode
from hopdim.core import (DimensioningResult, FailureEstimate, Method, ResourceGrid, ScenarioConfig,
                         balanced_factorization, check_pattern_fits, require, sample_flat_patterns, substream)
from hopdim.exceptions import InfeasibleFactorizationError, StateSpaceTooLargeError, StatisticalPreconditionError


logger = logging.getLogger(__name__)

# first spawn key element of the estimator substreams
STREAM_TAG: int = 0x486F70


@dataclass(frozen=True)
class SimJob:
    """
    One Monte-Carlo estimate of the failure probability.

    Attributes:
        scenario (ScenarioConfig): Interferers, repetitions, target and resolution capability.
        grid (ResourceGrid): The frame.
        mode (SampleMode): Pattern sampling mode of every device.
        samples (int): Simulated frames.
        master_seed (int): Root of every substream of the job.
        chunk_size (int): Frames per work unit, rounded to whole substream blocks.
        stream_key (Tuple[int, ...]): Extra spawn key prefix, distinct keys give independent jobs.
    """

    scenario: ScenarioConfig
    grid: ResourceGrid
    mode: SampleMode = field(default_factory=lambda: config.SAMPLE_MODE)
    samples: int = field(default_factory=lambda: config.SAMPLES)
    master_seed: int = field(default_factory=lambda: config.SEED)
    chunk_size: int = field(default_factory=lambda: config.CHUNK_SIZE)
    stream_key: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        require(self.samples >= 1, 'samples', self.samples, 'samples >= 1')
        require(self.chunk_size >= 1, 'chunk_size', self.chunk_size, 'chunk_size >= 1')
        require(0 <= self.master_seed < 2 ** 64, 'master_seed', self.master_seed, '0 <= master_seed < 2**64')
        check_pattern_fits(self.grid, self.scenario.n, self.mode)

    @classmethod
    def for_n_ru(cls, scenario: ScenarioConfig, n_ru: int, mode: Optional[SampleMode] = None,
                 **kwargs) -> 'SimJob':
        """
        Builds a job on a grid of n_ru units, auto-factorized in latin mode.

        The mode defaults to HOPDIM_SAMPLE_MODE.

        Raises:
            InfeasibleFactorizationError: Latin mode and no feasible split exists.
        """
        mode = mode or config.SAMPLE_MODE
        return cls(scenario=scenario, grid=ResourceGrid.from_n_ru(n_ru, scenario.n, mode), mode=mode, **kwargs)


def _count_block_failures(job: SimJob, block: int, size: int) -> int:
    """
    Failed frames among the size frames of one substream block.
    """
    scenario: ScenarioConfig = job.scenario
    n: int = scenario.n
    d: int = scenario.d
    rng: np.random.Generator = substream(job.master_seed, *job.stream_key, STREAM_TAG, block)

    patterns: np.ndarray = sample_flat_patterns(job.grid, n, job.mode, rng, size * (d + 1)).reshape(size, d + 1, n)

    # shift every frame to its own index range so one sorted array serves all frames
    offsets: np.ndarray = (np.arange(size, dtype=np.int64) * job.grid.n_ru)[:, None]
    targets: np.ndarray = (patterns[:, 0, :] + offsets).ravel()
    hits: np.ndarray = np.sort(patterns[:, 1:, :].reshape(size, d * n) + offsets, axis=1).ravel()

    # interferer patterns have distinct cells, so multiplicity is the number of interferers on the cell
    counts: np.ndarray = (np.searchsorted(hits, targets, side='right')
                          - np.searchsorted(hits, targets, side='left')).reshape(size, n)
    return int(np.count_nonzero(np.all(counts > scenario.ncmax, axis=1)))


def _count_chunk_failures(job: SimJob, blocks: Iterable[int]) -> int:
    failures: int = 0
    for block in blocks:
        size: int = min(config.STREAM_BLOCK, job.samples - block * config.STREAM_BLOCK)
        failures += _count_block_failures(job, block, size)
    return failures


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Worker threads, falling back to the configured value and then to the cpu count.
    """
    if threads is None:
        threads = config.THREADS
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def estimate_failure(job: SimJob, threads: Optional[int] = None) -> FailureEstimate:
    """
    Estimates the failure probability of a job by simulation.

    Every frame draws the target pattern and d interferer patterns i.i.d.;
    the frame fails when each of the n target cells holds more than ncmax
    interferers. Frames are drawn in blocks of config.STREAM_BLOCK from the
    substream (master_seed, *stream_key, STREAM_TAG, block), so the count does
    not depend on chunk_size or on the number of threads.

    Args:
        job (SimJob): The job.
        threads (Optional[int]): Worker threads, see resolve_threads.

    Returns:
        FailureEstimate: Counts, p_hat and 95% Wilson interval.
    """
    scenario: ScenarioConfig = job.scenario
    if scenario.ncmax >= scenario.d:
        logger.info(f'ncmax={scenario.ncmax} >= d={scenario.d}, no frame can fail')
        return FailureEstimate.from_counts(0, job.samples, job.master_seed)

    blocks: int = math.ceil(job.samples / config.STREAM_BLOCK)
    per_chunk: int = max(1, job.chunk_size // config.STREAM_BLOCK)
    chunks: List[range] = [range(start, min(start + per_chunk, blocks)) for start in range(0, blocks, per_chunk)]
    workers: int = min(resolve_threads(threads), len(chunks))

    logger.info(f'simulating {job.samples} frames of {scenario} on {job.grid} '
                f'({job.mode.name.lower()}, {len(chunks)} chunks, {workers} threads)')

    if workers == 1:
        failures: int = sum(_count_chunk_failures(job, chunk) for chunk in chunks)
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            failures = sum(executor.map(lambda chunk: _count_chunk_failures(job, chunk), chunks))

    estimate: FailureEstimate = FailureEstimate.from_counts(failures, job.samples, job.master_seed)
    logger.info(f'p_hat={estimate.p_hat} [{estimate.ci_low}, {estimate.ci_high}]')
    return estimate


def enumerate_patterns(grid: ResourceGrid, n: int, mode: SampleMode) -> List[Tuple[int, ...]]:
    """
    Every pattern of the mode as flat indices, each exactly once.
    """
    check_pattern_fits(grid, n, mode)
    if mode is SampleMode.UNIFORM:
        return list(itertools.combinations(range(grid.n_ru), n))

    return [
        tuple(sorted(channel * grid.q + slot for channel, slot in zip(channels, slots)))
        for channels in itertools.combinations(range(grid.p), n)
        for slots in itertools.permutations(range(grid.q), n)
    ]


def exact_failure_bruteforce(scenario: ScenarioConfig, grid: ResourceGrid, mode: SampleMode) -> Fraction:
    """
    Exact failure probability over every joint pattern assignment.

    Joint assignments are counted per target pattern: interferers only matter
    through the subset of target cells they hit, so the d interferers are
    folded in one at a time over per-cell counts capped at ncmax + 1.

    Args:
        scenario (ScenarioConfig): The scenario, scenario.n repetitions.
        grid (ResourceGrid): The frame.
        mode (SampleMode): Pattern sampling mode.

    Returns:
        Fraction: Failed joint assignments over all joint assignments.

    Raises:
        StateSpaceTooLargeError: The joint space exceeds config.BRUTEFORCE_LIMIT.
    """
    patterns: List[Tuple[int, ...]] = enumerate_patterns(grid, scenario.n, mode)
    size: int = len(patterns) ** (scenario.d + 1)
    if size > config.BRUTEFORCE_LIMIT:
        raise StateSpaceTooLargeError(size=size, limit=config.BRUTEFORCE_LIMIT)

    cap: int = scenario.ncmax + 1
    failed: int = 0
    for target in patterns:
        masks: Counter = Counter(tuple(int(cell in pattern) for cell in target) for pattern in patterns)

        states: Dict[Tuple[int, ...], int] = {(0,) * scenario.n: 1}
        for _ in range(scenario.d):
            folded: Dict[Tuple[int, ...], int] = Counter()
            for state, weight in states.items():
                for mask, count in masks.items():
                    folded[tuple(min(cap, s + m) for s, m in zip(state, mask))] += weight * count
            states = folded

        failed += sum(weight for state, weight in states.items() if min(state) >= cap)

    logger.debug(f'{failed} failed joint assignments out of {size}')
    return Fraction(failed, size)


def _latin_feasible(n_ru: int, n: int) -> bool:
    try:
        balanced_factorization(n_ru, n)
    except InfeasibleFactorizationError:
        return False
    return True


class _Candidates:
    """
    Lazily extended list of the resource counts a scan may try, with the skipped ones.
    """

    def __init__(self, n: int, mode: SampleMode) -> None:
        self._n: int = n
        self._mode: SampleMode = mode
        self._next: int = n * n if mode is SampleMode.LATIN else n
        self.values: List[int] = []
        self.skipped: List[int] = []

    def __getitem__(self, index: int) -> int:
        while len(self.values) <= index:
            if self._mode is SampleMode.UNIFORM or _latin_feasible(self._next, self._n):
                self.values.append(self._next)
            else:
                self.skipped.append(self._next)
            self._next += 1
        return self.values[index]


def search_min_ru(n: int, d: int, pf_target: float, ncmax: int, mode: SampleMode, samples: int,
                  master_seed: int, threads: Optional[int] = None,
                  chunk_size: Optional[int] = None) -> DimensioningResult:
    """
    Smallest resource count whose empirical failure probability meets the target.

    Candidates grow from n (n^2 in latin mode, below which no latin split
    exists) with doubling steps and are then bisected on p_hat <= pf_target.
    Each candidate n_ru is simulated on the fresh substream keyed by n_ru.
    Latin candidates without a feasible split are skipped, logged and
    reported in the result.

    Args:
        n (int): Packet repetitions.
        d (int): Interfering devices.
        pf_target (float): Target failure probability.
        ncmax (int): Maximum resolvable collisions.
        mode (SampleMode): Pattern sampling mode.
        samples (int): Frames per candidate, at least 100 / pf_target.
        master_seed (int): Root seed.
        threads (Optional[int]): Worker threads.
        chunk_size (Optional[int]): Frames per work unit.

    Returns:
        DimensioningResult: Monte-Carlo result with the estimate at the returned n_ru.

    Raises:
        StatisticalPreconditionError: samples < 100 / pf_target.
    """
    scenario: ScenarioConfig = ScenarioConfig(d=d, n=n, pf_target=pf_target, ncmax=ncmax)
    required: int = math.ceil(100.0 / pf_target)
    if samples < required:
        raise StatisticalPreconditionError(samples=samples, required=required)

    candidates: _Candidates = _Candidates(n, mode)
    estimates: Dict[int, FailureEstimate] = {}

    def passes(index: int) -> bool:
        n_ru: int = candidates[index]
        if n_ru not in estimates:
            job: SimJob = SimJob.for_n_ru(scenario, n_ru, mode, samples=samples, master_seed=master_seed,
                                          chunk_size=chunk_size or config.CHUNK_SIZE, stream_key=(n_ru,))
            estimates[n_ru] = estimate_failure(job, threads)
            logger.debug(f'n_ru={n_ru}: p_hat={estimates[n_ru].p_hat}')
        return estimates[n_ru].p_hat <= pf_target

    n_ru: int = candidates[numerics.bisect_min_integer(passes, lo=0)]
    skipped: Tuple[int, ...] = tuple(value for value in candidates.skipped if value < n_ru)
    if skipped:
        logger.warning(f'{len(skipped)} candidates without a latin split skipped below n_ru={n_ru}: {skipped}')

    return DimensioningResult(n=n, n_ru=n_ru, method=Method.MONTE_CARLO, pf_achieved=estimates[n_ru].p_hat,
                              estimate=estimates[n_ru], skipped=skipped)


def sweep_min_ru(ns: Iterable[int], d: int, pf_target: float, ncmax: int, mode: SampleMode, samples: int,
                 master_seed: int, threads: Optional[int] = None) -> List[DimensioningResult]:
    """
    Simulated resource need for every repetition count in ns, one search each.
    """
    return [search_min_ru(n, d, pf_target, ncmax, mode, samples, master_seed, threads) for n in ns]
