import functools
import json
import logging
import sys
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Dict, Iterator, List, Optional, TextIO

import typer

import hopdim.logger  # noqa: F401
from hopdim import analytic, config, montecarlo, numerics
from hopdim.config import SampleMode
from hopdim.core import FailureEstimate, Method, ResourceGrid, ScenarioConfig
from hopdim.exceptions import (ConvergenceError, PreconditionError, RangeError, StateSpaceTooLargeError,
                               StatisticalPreconditionError)
from hopdim.sweep import FIG4_D, Fig3Sweep, Fig4Sweep, Sweep


logger = logging.getLogger(__name__)

EXIT_DOMAIN: int = 3
EXIT_STATISTICAL: int = 4

app = typer.Typer(add_completion=False, no_args_is_help=True,
                  help='Dimensioning of frequency-hopping packet repetition under interference.')
analytic_app = typer.Typer(no_args_is_help=True, help='Closed-form quantities.')
app.add_typer(analytic_app, name='analytic')


class ModeChoice(str, Enum):
    latin = 'latin'
    uniform = 'uniform'


class MethodChoice(str, Enum):
    closed_form = 'closed_form'
    numeric = 'numeric'
    montecarlo = 'montecarlo'


N = Annotated[int, typer.Option('--n', help='Packet repetitions per frame.')]
D = Annotated[int, typer.Option('--d', help='Interfering devices.')]
PF = Annotated[float, typer.Option('--pf', help='Target failure probability.')]
NCMAX = Annotated[int, typer.Option('--ncmax', help='Maximum resolvable collisions per resource unit.')]
NRU = Annotated[Optional[int], typer.Option('--nru', help='Resource units, auto-factorized in latin mode.')]
P = Annotated[Optional[int], typer.Option('--p', help='Frequency channels.')]
Q = Annotated[Optional[int], typer.Option('--q', help='Time slots.')]
MODE = Annotated[ModeChoice, typer.Option('--mode', help='Pattern sampling mode.')]
SAMPLES = Annotated[int, typer.Option('--samples', help='Simulated frames.')]
SEED = Annotated[int, typer.Option('--seed', help='Master seed.')]
THREADS = Annotated[Optional[int], typer.Option('--threads', help='Worker threads, defaults to HOPDIM_THREADS.')]
OUT = Annotated[Optional[Path], typer.Option('--out', help='Write to this file instead of stdout.')]
PRETTY = Annotated[bool, typer.Option('--pretty', help='Human-readable text instead of JSON.')]

DEFAULT_MODE: ModeChoice = ModeChoice(config.SAMPLE_MODE.name.lower())


def handle_errors(command):
    """
    Maps library errors of a command to exit codes, 3 for domain and 4 for statistical preconditions.
    """
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except StatisticalPreconditionError as e:
            logger.error(f'{e}')
            typer.echo(f'Error: {e}', err=True)
            raise typer.Exit(code=EXIT_STATISTICAL)
        except (PreconditionError, RangeError, ConvergenceError, StateSpaceTooLargeError) as e:
            logger.error(f'{e}')
            typer.echo(f'Error: {e}', err=True)
            raise typer.Exit(code=EXIT_DOMAIN)

    return wrapper


@contextmanager
def output(out: Optional[Path]) -> Iterator[TextIO]:
    if out is None:
        yield sys.stdout
        return
    with out.open('w', newline='', encoding='utf-8') as stream:
        yield stream


def result(value: Any, method: Method) -> Dict[str, Any]:
    return {'value': value, 'method': method.value}


def emit(command: str, inputs: Dict[str, Any], results: Dict[str, Dict[str, Any]], out: Optional[Path] = None,
         pretty: bool = False) -> None:
    """
    Writes one report, a JSON object by default.
    """
    if pretty:
        lines: List[str] = [command]
        lines += [f'  {name} = {value}' for name, value in inputs.items()]
        lines += [f'{name} = {entry["value"]} ({entry["method"]})' for name, entry in results.items()]
        text: str = '\n'.join(lines)
    else:
        text = json.dumps({'schema_version': config.SCHEMA_VERSION, 'command': command, 'inputs': inputs,
                           'results': results}, sort_keys=True)

    with output(out) as stream:
        stream.write(text + '\n')


def resolve_grid(n: int, n_ru: Optional[int], p: Optional[int], q: Optional[int],
                 mode: SampleMode) -> ResourceGrid:
    """
    Grid from either --nru or --p/--q, giving both or neither is a usage error.
    """
    if n_ru is not None and (p is not None or q is not None):
        raise typer.BadParameter('Give either --nru or --p/--q, not both.', param_hint='--nru')
    if n_ru is not None:
        return ResourceGrid.from_n_ru(n_ru, n, mode)
    if p is None or q is None:
        raise typer.BadParameter('Give --nru or both --p and --q.', param_hint='--p/--q')
    return ResourceGrid(p=p, q=q)


def estimate_results(estimate: FailureEstimate) -> Dict[str, Dict[str, Any]]:
    return {name: result(getattr(estimate, name), Method.MONTE_CARLO)
            for name in ('p_hat', 'ci_low', 'ci_high', 'failures', 'samples', 'seed')}


@analytic_app.command('failure')
@handle_errors
def analytic_failure(n: N, d: D, n_ru: NRU = None, p: P = None, q: Q = None, ncmax: NCMAX = 0,
                     out: OUT = None, pretty: PRETTY = False) -> None:
    """
    Failure probability at a given number of resource units.
    """
    grid: ResourceGrid = resolve_grid(n, n_ru, p, q, SampleMode.UNIFORM)
    value: float = analytic.failure_prob_resolvable(n, d, grid.n_ru, ncmax)
    loss: float = analytic.repetition_loss_prob(n, d, grid.n_ru, ncmax)
    emit('analytic failure', {'n': n, 'd': d, 'n_ru': grid.n_ru, 'ncmax': ncmax},
         {'pf': result(value, Method.CLOSED_FORM), 'p_loss': result(loss, Method.CLOSED_FORM)}, out, pretty)


@analytic_app.command('required-ru')
@handle_errors
def analytic_required_ru(n: N, d: D = config.DEFAULT_D, pf: PF = config.DEFAULT_PF, ncmax: NCMAX = 0,
                         out: OUT = None, pretty: PRETTY = False) -> None:
    """
    Resource units needed with n repetitions, numeric inversion when ncmax has no closed form.
    """
    if ncmax == 0:
        entry = result(analytic.required_ru_no_resolution(n, d, pf), Method.CLOSED_FORM)
    elif ncmax == 1:
        entry = result(analytic.required_ru_single_resolution(n, d, pf), Method.CLOSED_FORM)
    else:
        entry = result(numerics.invert_required_ru_numeric(n, d, pf, ncmax), Method.NUMERIC_INVERSION)
    emit('analytic required-ru', {'n': n, 'd': d, 'pf': pf, 'ncmax': ncmax}, {'n_ru': entry}, out, pretty)


@analytic_app.command('min-ru')
@handle_errors
def analytic_min_ru(d: D = config.DEFAULT_D, pf: PF = config.DEFAULT_PF, ncmax: NCMAX = 0,
                    out: OUT = None, pretty: PRETTY = False) -> None:
    """
    Minimum resource units over the repetition count and the repetitions reaching it.
    """
    if ncmax == 0:
        results = {
            'n_ru': result(analytic.min_ru_no_resolution(d, pf), Method.CLOSED_FORM),
            'n_ru_linear': result(analytic.min_ru_no_resolution_linear(d, pf), Method.LINEAR_APPROX),
            'n_star': result(analytic.optimal_reps_no_resolution(pf), Method.CLOSED_FORM),
        }
    elif ncmax == 1:
        results = {
            'n_ru': result(analytic.min_ru_single_resolution(d, pf), Method.CLOSED_FORM),
            'n_star': result(analytic.optimal_reps_single_resolution(pf), Method.CLOSED_FORM),
        }
    else:
        n_star, n_ru_min = numerics.optimal_reps_numeric(d, pf, ncmax)
        results = {
            'n_ru': result(n_ru_min, Method.NUMERIC_INVERSION),
            'n_star': result(n_star, Method.NUMERIC_INVERSION),
        }
    emit('analytic min-ru', {'d': d, 'pf': pf, 'ncmax': ncmax}, results, out, pretty)


@analytic_app.command('opt-reps')
@handle_errors
def analytic_opt_reps(d: D = config.DEFAULT_D, pf: PF = config.DEFAULT_PF, ncmax: NCMAX = 0,
                      out: OUT = None, pretty: PRETTY = False) -> None:
    """
    Optimal repetition count, continuous closed form and integer scan.
    """
    results: Dict[str, Dict[str, Any]] = {}
    if ncmax == 0:
        results['n_star_continuous'] = result(analytic.optimal_reps_no_resolution(pf), Method.CLOSED_FORM)
    elif ncmax == 1:
        results['n_star_continuous'] = result(analytic.optimal_reps_single_resolution(pf), Method.CLOSED_FORM)

    n_star, n_ru_min = numerics.optimal_reps_numeric(d, pf, ncmax)
    results['n_star'] = result(n_star, Method.NUMERIC_INVERSION)
    results['n_ru_min'] = result(n_ru_min, Method.NUMERIC_INVERSION)
    emit('analytic opt-reps', {'d': d, 'pf': pf, 'ncmax': ncmax}, results, out, pretty)


@app.command('invert')
@handle_errors
def invert(n: N, d: D = config.DEFAULT_D, pf: PF = config.DEFAULT_PF, ncmax: NCMAX = 0,
           out: OUT = None, pretty: PRETTY = False) -> None:
    """
    Smallest resource count meeting the target, by numeric inversion for any ncmax.
    """
    n_ru: int = numerics.invert_required_ru_numeric(n, d, pf, ncmax)
    emit('invert', {'n': n, 'd': d, 'pf': pf, 'ncmax': ncmax},
         {'n_ru': result(n_ru, Method.NUMERIC_INVERSION),
          'pf_achieved': result(analytic.failure_prob_resolvable(n, d, n_ru, ncmax), Method.CLOSED_FORM)},
         out, pretty)


@app.command('simulate')
@handle_errors
def simulate(n: N, d: D, n_ru: NRU = None, p: P = None, q: Q = None, ncmax: NCMAX = 0,
             mode: MODE = DEFAULT_MODE, samples: SAMPLES = config.SAMPLES, seed: SEED = config.SEED,
             threads: THREADS = None, out: OUT = None, pretty: PRETTY = False) -> None:
    """
    Monte-Carlo estimate of the failure probability on a grid.
    """
    sample_mode: SampleMode = SampleMode.from_str(mode.value)
    grid: ResourceGrid = resolve_grid(n, n_ru, p, q, sample_mode)
    scenario: ScenarioConfig = ScenarioConfig(d=d, n=n, pf_target=config.DEFAULT_PF, ncmax=ncmax)
    job = montecarlo.SimJob(scenario=scenario, grid=grid, mode=sample_mode, samples=samples, master_seed=seed)
    estimate: FailureEstimate = montecarlo.estimate_failure(job, threads)

    emit('simulate', {'n': n, 'd': d, 'ncmax': ncmax, 'mode': mode.value, 'p': grid.p, 'q': grid.q,
                      'n_ru': grid.n_ru, 'samples': samples, 'seed': seed},
         estimate_results(estimate), out, pretty)


@app.command('search')
@handle_errors
def search(n: N, d: D = config.DEFAULT_D, pf: PF = 1e-2, ncmax: NCMAX = 0, mode: MODE = DEFAULT_MODE,
           samples: SAMPLES = config.SAMPLES, seed: SEED = config.SEED, threads: THREADS = None,
           out: OUT = None, pretty: PRETTY = False) -> None:
    """
    Smallest resource count whose simulated failure probability meets the target.
    """
    found = montecarlo.search_min_ru(n, d, pf, ncmax, SampleMode.from_str(mode.value), samples, seed, threads)

    results: Dict[str, Dict[str, Any]] = {'n_ru': result(found.n_ru, Method.MONTE_CARLO)}
    results.update(estimate_results(found.estimate))
    results['skipped'] = result(list(found.skipped), Method.MONTE_CARLO)
    emit('search', {'n': n, 'd': d, 'pf': pf, 'ncmax': ncmax, 'mode': mode.value, 'samples': samples,
                    'seed': seed}, results, out, pretty)


def write_sweep(sweep: Sweep, out: Optional[Path]) -> None:
    with output(out) as stream:
        sweep(stream)


@app.command('sweep-fig3')
@handle_errors
def sweep_fig3(d: D = config.DEFAULT_D, pf: PF = config.DEFAULT_PF,
               ncmax: Annotated[List[int], typer.Option('--ncmax', help='Resolution capabilities, repeatable.')] = [0, 1, 2, 3],
               n_min: Annotated[int, typer.Option('--n-min', help='Smallest repetition count.')] = 2,
               n_max: Annotated[int, typer.Option('--n-max', help='Largest repetition count.')] = 26,
               method: Annotated[List[MethodChoice], typer.Option('--method', help='Methods, repeatable.')] = [
                   MethodChoice.closed_form, MethodChoice.numeric],
               mc_pf: Annotated[float, typer.Option('--mc-pf', help='Relaxed target of the Monte-Carlo curves.')] = 1e-2,
               mode: MODE = ModeChoice.uniform, samples: SAMPLES = config.SAMPLES, seed: SEED = config.SEED,
               threads: THREADS = None, out: OUT = None) -> None:
    """
    Resource units against repetitions for every method and ncmax, as CSV.
    """
    if n_min > n_max:
        raise typer.BadParameter(f'--n-min {n_min} exceeds --n-max {n_max}.', param_hint='--n-min')

    sweep = Fig3Sweep(d=d, pf_target=pf, ncmax_list=ncmax, n_range=range(n_min, n_max + 1),
                      methods=[Method(choice.value) for choice in method], mc_pf_target=mc_pf,
                      mode=SampleMode.from_str(mode.value), samples=samples, master_seed=seed, threads=threads)
    write_sweep(sweep, out)


@app.command('sweep-fig4')
@handle_errors
def sweep_fig4(d: Annotated[List[int], typer.Option('--d', help='Interfering devices, repeatable.')] = list(FIG4_D),
               pf: PF = config.DEFAULT_PF,
               ncmax: Annotated[List[int], typer.Option('--ncmax', help='0 and/or 1, repeatable.')] = [0, 1],
               out: OUT = None) -> None:
    """
    Large-d minimum resource forms against their reference over d, as CSV.
    """
    write_sweep(Fig4Sweep(ds=d, pf_target=pf, ncmax_list=ncmax), out)


def main() -> None:
    app()
