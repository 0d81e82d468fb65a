import csv
import logging
from abc import ABC, abstractmethod
from typing import Dict, Iterator, List, Optional, Sequence, TextIO, Tuple

from hopdim import analytic, config, montecarlo, numerics
from hopdim.config import SampleMode
from hopdim.core import DimensioningResult, Method, require


logger = logging.getLogger(__name__)

FIG3_HEADER: Tuple[str, ...] = ('method', 'ncmax', 'n', 'd', 'pf_target', 'n_ru')
MONTE_CARLO_HEADER: Tuple[str, ...] = ('p_hat', 'ci_low', 'ci_high', 'samples', 'seed')
MINIMUM_COLUMN: str = 'is_min'
FIG4_HEADER: Tuple[str, ...] = ('d', 'ncmax', 'n', 'n_ru_min_asymptotic', 'n_ru_min_reference',
                                'n_ru_min_closed_form', 'rel_gap')

# resolution capabilities with a closed form
CLOSED_FORM_NCMAX: Tuple[int, ...] = (0, 1)

# interferer counts of the asymptotic accuracy sweep
FIG4_D: Tuple[int, ...] = (10, 20, 50, 100, 200, 500, 1000)


def format_pf(pf_target: float) -> str:
    return f'{pf_target:g}'


class Sweep(ABC):
    """
    Sweep

    A blueprint for parameter sweeps written as CSV with a fixed header.

    Methods:
        header() -> Sequence[str]: The CSV columns. Must be implemented by subclasses.
        rows() -> Iterator[Dict]: The CSV rows, keyed by column. Must be implemented by subclasses.
        __call__(stream: TextIO) -> int: Writes the sweep and returns the number of rows.
    """

    @property
    @abstractmethod
    def header(self) -> Sequence[str]:
        """
        The CSV columns, in order.

        Raises:
            NotImplementedError: Subclasses must define this property.
        """
        raise NotImplementedError('Sweeps must define this property.')

    @abstractmethod
    def rows(self) -> Iterator[Dict]:
        """
        Produces the rows of the sweep, deterministically for fixed inputs.

        Raises:
            NotImplementedError: Subclasses must define this method.
        """
        raise NotImplementedError('Sweeps must define this method.')

    def __call__(self, stream: TextIO) -> int:
        """
        Writes the header and every row to the stream.

        Args:
            stream (TextIO): Text stream, opened with newline=''.

        Returns:
            int: Rows written.
        """
        writer = csv.DictWriter(stream, fieldnames=list(self.header), restval='', lineterminator='\n')
        writer.writeheader()

        count: int = 0
        for row in self.rows():
            writer.writerow(row)
            count += 1

        logger.info(f'{type(self).__name__} wrote {count} rows')
        return count


def mark_minima(rows: List[Dict]) -> List[Dict]:
    """
    Sets is_min on the smallest n_ru of every (method, ncmax) curve, ties to the smaller n.
    """
    best: Dict[Tuple[str, int], Dict] = {}
    for row in rows:
        key: Tuple[str, int] = (row['method'], row['ncmax'])
        row[MINIMUM_COLUMN] = 0
        if key not in best or (row['n_ru'], row['n']) < (best[key]['n_ru'], best[key]['n']):
            best[key] = row

    for row in best.values():
        row[MINIMUM_COLUMN] = 1
    return rows


class Fig3Sweep(Sweep):
    """
    Resource units needed against the repetition count, one curve per method and ncmax.

    Closed-form curves exist for ncmax 0 and 1, numeric inversion curves for every
    ncmax. The optional Monte-Carlo curves run search_min_ru at the relaxed target
    mc_pf_target, since the design target is out of reach of desk-scale simulation.
    """

    def __init__(self, d: int = config.DEFAULT_D, pf_target: float = config.DEFAULT_PF,
                 ncmax_list: Sequence[int] = (0, 1, 2, 3), n_range: range = range(2, 27),
                 methods: Sequence[Method] = (Method.CLOSED_FORM, Method.NUMERIC_INVERSION),
                 mc_pf_target: float = 1e-2, mode: SampleMode = SampleMode.UNIFORM,
                 samples: Optional[int] = None, master_seed: Optional[int] = None,
                 threads: Optional[int] = None) -> None:
        require(d >= 0, 'd', d, 'd >= 0')
        require(len(ncmax_list) > 0, 'ncmax_list', list(ncmax_list), 'a non-empty list')
        require(len(n_range) > 0 and n_range[0] >= 1, 'n_range', n_range, 'a non-empty range of n >= 1')
        require(len(methods) > 0, 'methods', list(methods), 'a non-empty subset of closed_form, numeric, montecarlo')
        require(Method.LINEAR_APPROX not in methods, 'methods', list(methods),
                'a subset of closed_form, numeric, montecarlo')
        if Method.MONTE_CARLO in methods:
            require(samples is not None and master_seed is not None, 'samples', samples,
                    'samples and seed with the montecarlo method')

        self.d: int = d
        self.pf_target: float = pf_target
        self.ncmax_list: List[int] = sorted(set(ncmax_list))
        self.n_range: range = n_range
        self.methods: List[Method] = [method for method in Method if method in methods]
        self.mc_pf_target: float = mc_pf_target
        self.mode: SampleMode = mode
        self.samples: Optional[int] = samples
        self.master_seed: Optional[int] = master_seed
        self.threads: Optional[int] = threads

    @property
    def header(self) -> Sequence[str]:
        if Method.MONTE_CARLO in self.methods:
            return FIG3_HEADER + MONTE_CARLO_HEADER + (MINIMUM_COLUMN,)
        return FIG3_HEADER + (MINIMUM_COLUMN,)

    def _row(self, method: Method, ncmax: int, n: int, pf_target: float, n_ru: int) -> Dict:
        return {'method': method.value, 'ncmax': ncmax, 'n': n, 'd': self.d,
                'pf_target': format_pf(pf_target), 'n_ru': n_ru}

    def _closed_form(self) -> Iterator[Dict]:
        for ncmax in self.ncmax_list:
            if ncmax not in CLOSED_FORM_NCMAX:
                logger.debug(f'no closed form for ncmax={ncmax}')
                continue
            required = (analytic.required_ru_no_resolution if ncmax == 0
                        else analytic.required_ru_single_resolution)
            for n in self.n_range:
                yield self._row(Method.CLOSED_FORM, ncmax, n, self.pf_target, required(n, self.d, self.pf_target))

    def _numeric(self) -> Iterator[Dict]:
        for ncmax in self.ncmax_list:
            for n in self.n_range:
                n_ru: int = numerics.invert_required_ru_numeric(n, self.d, self.pf_target, ncmax)
                yield self._row(Method.NUMERIC_INVERSION, ncmax, n, self.pf_target, n_ru)

    def _monte_carlo(self) -> Iterator[Dict]:
        for ncmax in self.ncmax_list:
            results: List[DimensioningResult] = montecarlo.sweep_min_ru(
                self.n_range, self.d, self.mc_pf_target, ncmax, self.mode, self.samples, self.master_seed,
                self.threads
            )
            for result in results:
                row: Dict = self._row(Method.MONTE_CARLO, ncmax, result.n, self.mc_pf_target, result.n_ru)
                row.update(p_hat=result.estimate.p_hat, ci_low=result.estimate.ci_low,
                           ci_high=result.estimate.ci_high, samples=result.estimate.samples,
                           seed=result.estimate.seed)
                yield row

    def rows(self) -> Iterator[Dict]:
        producers = {
            Method.CLOSED_FORM: self._closed_form,
            Method.NUMERIC_INVERSION: self._numeric,
            Method.MONTE_CARLO: self._monte_carlo,
        }
        for method in self.methods:
            yield from mark_minima(list(producers[method]()))


class Fig4Sweep(Sweep):
    """
    Accuracy of the large-d minimum resource forms against a reference, over d.

    The repetition count of every row is the integer optimum at the reference
    interferer count ref_d, which does not move with d. The reference is the
    destructive-collision requirement at that count for ncmax 0 and the numeric
    inversion for ncmax 1. The exact closed forms (minimum over continuous n for
    ncmax 0, the W-1 requirement for ncmax 1) are given alongside.
    """

    def __init__(self, ds: Sequence[int] = FIG4_D, pf_target: float = config.DEFAULT_PF,
                 ncmax_list: Sequence[int] = CLOSED_FORM_NCMAX, ref_d: int = config.DEFAULT_D) -> None:
        require(len(ds) > 0 and min(ds) >= 1, 'ds', list(ds), 'a non-empty list of d >= 1')
        require(len(ncmax_list) > 0 and set(ncmax_list) <= set(CLOSED_FORM_NCMAX), 'ncmax_list', list(ncmax_list),
                'a non-empty subset of {0, 1}')
        require(0.0 < pf_target < 1.0, 'pf_target', pf_target, '0 < pf_target < 1')

        self.ds: List[int] = list(ds)
        self.pf_target: float = pf_target
        self.ncmax_list: List[int] = sorted(set(ncmax_list))
        self.ref_d: int = ref_d

    @property
    def header(self) -> Sequence[str]:
        return FIG4_HEADER

    def _point(self, d: int, ncmax: int, n: int) -> Tuple[int, int, int]:
        pf: float = self.pf_target
        if ncmax == 0:
            return (analytic.min_ru_no_resolution_linear(d, pf),
                    analytic.required_ru_no_resolution(n, d, pf),
                    analytic.min_ru_no_resolution(d, pf))
        return (analytic.min_ru_single_resolution(d, pf),
                numerics.invert_required_ru_numeric(n, d, pf, ncmax),
                analytic.required_ru_single_resolution(n, d, pf))

    def rows(self) -> Iterator[Dict]:
        optima: Dict[int, int] = {}
        for ncmax in self.ncmax_list:
            optima[ncmax], _ = numerics.optimal_reps_numeric(self.ref_d, self.pf_target, ncmax)

        for d in self.ds:
            for ncmax in self.ncmax_list:
                n: int = optima[ncmax]
                asymptotic, reference, closed_form = self._point(d, ncmax, n)
                yield {
                    'd': d, 'ncmax': ncmax, 'n': n,
                    'n_ru_min_asymptotic': asymptotic,
                    'n_ru_min_reference': reference,
                    'n_ru_min_closed_form': closed_form,
                    'rel_gap': f'{(asymptotic - reference) / reference:.6f}',
                }
