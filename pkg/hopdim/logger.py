import logging
from logging.handlers import RotatingFileHandler
from typing import List

from hopdim import config


# Configure logging for external libraries
logging.getLogger('concurrent.futures').setLevel(logging.WARNING)

# Console handler on stderr, stdout is reserved for results
handlers: List[logging.Handler] = [logging.StreamHandler()]
if config.LOG_FILE_PATH != 'None':
    handlers.append(RotatingFileHandler(config.LOG_FILE_PATH, maxBytes=2_000_000, backupCount=1))

# Configure root logger with console and file handlers
logging.basicConfig(
    handlers=handlers,
    format='%(asctime)s %(filename)s:%(lineno)s - %(funcName)s - %(name)s - %(levelname)s -  %(message)s',
    level=config.LOG_LEVEL
)
