import logging
import os
from typing import Dict, Optional
from logging.handlers import RotatingFileHandler

# Loggers already built in this process, by name
_LOGGERS: Dict[str, logging.Logger] = {}

DEFAULT_LOG_DIR = 'lab_logs'
LOG_DIR_ENV = 'SOBOLEV_LAB_LOG_DIR'
MAX_BYTES = 512 * 1024
BACKUPS = 3
SETUP_BACKUPS = 2
SETUP_LOGGER = 'Implementation'

RECORD_FORMAT = ('%(asctime)s - %(name)s - [%(levelname)s] - %(message)s\n'
                 'File: %(filename)s:%(lineno)d\n'
                 'Function: %(funcName)s\n'
                 '----------------------------------------')


def resolve_log_dir(log_dir: Optional[str] = None) -> str:
    """Log directory from the argument, the SOBOLEV_LAB_LOG_DIR variable or the default"""
    if log_dir:
        return log_dir
    return os.environ.get(LOG_DIR_ENV, DEFAULT_LOG_DIR)


def _rotating_file(path: str, backups: int, fmt: str, level: int) -> RotatingFileHandler:
    # delay: the file appears with the first record
    handler = RotatingFileHandler(filename=path, maxBytes=MAX_BYTES, backupCount=backups,
                                  encoding='utf-8', delay=True)
    handler.setFormatter(logging.Formatter(fmt))
    handler.setLevel(level)
    return handler


def _fresh(name: str, level: int) -> logging.Logger:
    logger = logging.getLogger(name)
    logger.handlers.clear()
    logger.propagate = False
    logger.setLevel(level)
    return logger


def setup_logger(name: str, log_dir: Optional[str] = None) -> logging.Logger:
    """
    Per-component logger: every record to <name>.log, errors also to the console

    Args:
        name: Component name (e.g., 'Quadrature', 'TransportSolver')
        log_dir: Directory for log files, see resolve_log_dir

    Returns:
        logging.Logger, the cached one when name was set up before
    """
    if name in _LOGGERS:
        return _LOGGERS[name]

    log_dir = resolve_log_dir(log_dir)
    logger = _fresh(name, logging.DEBUG)

    try:
        os.makedirs(log_dir, exist_ok=True)
        log_file = os.path.join(log_dir, f'{name.lower()}.log')

        console = logging.StreamHandler()
        console.setFormatter(logging.Formatter('%(levelname)s - %(message)s'))
        console.setLevel(logging.ERROR)
        logger.addHandler(console)
        logger.addHandler(_rotating_file(log_file, BACKUPS, RECORD_FORMAT, logging.DEBUG))
        _LOGGERS[name] = logger

        get_implementation_logger(log_dir).info(f"""
        Component logger {name}:
        - File: {log_file}
        - Rotation: {MAX_BYTES // 1024}KB x {BACKUPS}
        """)
        return logger

    except Exception as e:
        # Unwritable log directory: console only
        logging.basicConfig(level=logging.ERROR, format='%(levelname)s - %(message)s')
        fallback = logging.getLogger(name)
        fallback.error(f"Could not open the log directory {log_dir}: {str(e)}")
        return fallback


def get_implementation_logger(log_dir: Optional[str] = None) -> logging.Logger:
    """Logger recording which component loggers were opened, in implementation.log"""
    if SETUP_LOGGER in _LOGGERS:
        return _LOGGERS[SETUP_LOGGER]

    log_dir = resolve_log_dir(log_dir)
    os.makedirs(log_dir, exist_ok=True)

    logger = _fresh(SETUP_LOGGER, logging.INFO)
    logger.addHandler(_rotating_file(os.path.join(log_dir, 'implementation.log'), SETUP_BACKUPS,
                                     '%(asctime)s - Implementation - %(message)s', logging.INFO))
    _LOGGERS[SETUP_LOGGER] = logger
    return logger
