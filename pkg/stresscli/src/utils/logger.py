"""
Logging setup for the stress CLI.
"""

import logging
import sys
from typing import Optional

from engine.src.utils.logger import DEFAULT_FORMAT, ExtraDataFormatter

CLI_LOGGER_PREFIX = "stresscli"
ENGINE_LOGGER_PREFIX = "engine"


class CliLogFilter(logging.Filter):
    """
    Lets CLI records through; engine records only in verbose mode or when
    they are warnings and errors.
    """

    def __init__(self, verbose: bool = False):
        super().__init__()
        self.verbose = verbose

    def filter(self, record: logging.LogRecord) -> bool:
        if self.verbose or record.levelno >= logging.WARNING:
            return True
        return record.name.startswith(CLI_LOGGER_PREFIX)


def _engine_loggers():
    for name, logger in logging.Logger.manager.loggerDict.items():
        if name.startswith(ENGINE_LOGGER_PREFIX) and isinstance(logger, logging.Logger):
            yield logger


def _patch_engine_loggers(verbose: bool = False) -> None:
    """
    Engine loggers do not propagate, so the filter goes onto their own
    handlers, replacing any filter a previous call installed.
    """
    for logger in _engine_loggers():
        for handler in logger.handlers:
            for old in [f for f in handler.filters if isinstance(f, CliLogFilter)]:
                handler.removeFilter(old)
            handler.addFilter(CliLogFilter(verbose=verbose))
            if verbose:
                handler.setLevel(logging.DEBUG)
                logger.setLevel(logging.DEBUG)


def configure_global_logging(verbose: bool = False) -> None:
    """
    Route every record through one stdout handler with the engine's format.

    Args:
        verbose: Also show engine records below WARNING
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(logging.INFO)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stdout)
    handler.setLevel(logging.INFO)
    handler.addFilter(CliLogFilter(verbose=verbose))
    handler.setFormatter(ExtraDataFormatter(DEFAULT_FORMAT))
    root_logger.addHandler(handler)

    _patch_engine_loggers(verbose=verbose)


def setup_logger(
    name: str, level: Optional[int] = None, verbose: bool = False
) -> logging.Logger:
    """
    Configure global logging and return the logger called ``name``.

    Args:
        name: Logger name
        level: Logging level (defaults to INFO)
        verbose: Also show engine records below WARNING

    Returns:
        Configured logger instance
    """
    configure_global_logging(verbose=verbose)
    logger = logging.getLogger(name)
    logger.setLevel(logging.INFO if level is None else level)
    return logger


__all__ = ["setup_logger", "configure_global_logging", "CliLogFilter"]
