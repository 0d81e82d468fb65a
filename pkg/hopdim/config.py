import logging
from enum import Enum

from decouple import config


# Define an enumeration for the pattern sampling modes
class SampleMode(Enum):
    LATIN = 1
    UNIFORM = 2

    @staticmethod
    def from_str(label):
        if isinstance(label, SampleMode):
            return label

        if not isinstance(label, str):
            raise TypeError('Label must be a string.')

        if label.lower().strip() == 'latin':
            return SampleMode.LATIN
        elif label.lower().strip() == 'uniform':
            return SampleMode.UNIFORM
        else:
            raise ValueError(f'Unknown sample mode: {label}.')

# Define static configurations

# Version of the JSON documents emitted by the command line
SCHEMA_VERSION: int = 1

# Dynamic configurations

# Logging level for the application
# Possible values: logging.DEBUG, logging.INFO, logging.WARNING, logging.ERROR, logging.CRITICAL
LOG_LEVEL: int = config('LOGLEVEL', default=logging.INFO, cast=int)

# Rotating log file, set to None to log only on stderr
LOG_FILE_PATH: str = config('LOG_FILE_PATH', default='hopdim.log', cast=str)

# Scenario defaults, the values used for the reference figures

# Number of interfering devices
DEFAULT_D: int = config('HOPDIM_DEFAULT_D', default=100, cast=int)
# Target failure probability
DEFAULT_PF: float = config('HOPDIM_DEFAULT_PF', default=1e-6, cast=float)

# Monte-Carlo settings

# Worker threads for the estimator, 0 means one per cpu
THREADS: int = config('HOPDIM_THREADS', default=0, cast=int)

# Samples drawn from a single random substream, changing it changes every estimate
STREAM_BLOCK: int = config('HOPDIM_STREAM_BLOCK', default=1000, cast=int)

# Samples handed to a worker at once, it never changes the estimate
CHUNK_SIZE: int = config('HOPDIM_CHUNK_SIZE', default=100_000, cast=int)

# Default sample count and master seed
SAMPLES: int = config('HOPDIM_SAMPLES', default=1_000_000, cast=int)
SEED: int = config('HOPDIM_SEED', default=7, cast=int)

# Default pattern sampling mode
# Possible values: SampleMode.LATIN or SampleMode.UNIFORM
SAMPLE_MODE: SampleMode = config('HOPDIM_SAMPLE_MODE', default='latin', cast=SampleMode.from_str)

# Largest joint pattern space the exact enumeration accepts
BRUTEFORCE_LIMIT: int = config('HOPDIM_BRUTEFORCE_LIMIT', default=100_000_000, cast=int)

# Numerics settings

# Halley iterations before a Lambert W evaluation is declared divergent
MAX_HALLEY_ITERATIONS: int = config('HOPDIM_MAX_HALLEY_ITERATIONS', default=50, cast=int)

# Absolute tolerance on the maximiser of g(z)
MAXIMIZE_XATOL: float = config('HOPDIM_MAXIMIZE_XATOL', default=1e-10, cast=float)
