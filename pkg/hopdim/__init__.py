from hopdim.config import SampleMode
from hopdim.core import (DimensioningResult, FailureEstimate, HopPattern, Method, ResourceGrid, ScenarioConfig,
                         balanced_factorization, sample_pattern, substream, wilson_interval)
from hopdim.analytic import (collision_pmf, failure_prob_no_resolution, failure_prob_resolvable,
                             min_ru_no_resolution, min_ru_no_resolution_linear, min_ru_single_resolution,
                             optimal_reps_no_resolution, optimal_reps_single_resolution, repetition_loss_prob,
                             required_ru_no_resolution, required_ru_single_resolution, resolution_gain,
                             single_resolution_constants)
from hopdim.numerics import (BracketedSearchSpec, bisect_min_integer, invert_required_ru_numeric, lambert_w0,
                             lambert_wm1, maximize_g, optimal_reps_numeric)
from hopdim.montecarlo import SimJob, estimate_failure, exact_failure_bruteforce, search_min_ru, sweep_min_ru
from hopdim.sweep import Fig3Sweep, Fig4Sweep, Sweep
