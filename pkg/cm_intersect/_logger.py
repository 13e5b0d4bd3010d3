from __future__ import annotations

import argparse
import logging
import sys

import colorlog
from tqdm import tqdm

from cm_intersect import __module_name__ as LOGGER_NAME

LOG_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}


class TqdmLoggingHandler(logging.StreamHandler):
    """
    Routes records through tqdm.write so they land above an active term progress bar.
    """

    def __init__(self) -> None:
        super().__init__(sys.stderr)

    def emit(self, record: logging.LogRecord) -> None:
        try:
            tqdm.write(self.format(record), file=sys.stderr)
            self.flush()
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            self.handleError(record)


def cli_log_level(arguments: argparse.Namespace) -> int:
    """
    Level for the -q/-d/-v flags; -q wins over -d, -d over -v.
    """
    if arguments.quiet:
        return logging.ERROR
    if arguments.debug:
        return logging.DEBUG
    if arguments.verbose:
        return logging.INFO
    return logging.WARNING


def setup_cli_logger(arguments: argparse.Namespace) -> logging.Logger:
    """Configures the cm_intersect logger for the command line.

    In debug mode every line carries the name of the emitting module.

    Args:
        arguments (argparse.Namespace): The CLI arguments.

    Returns:
        logging.Logger: The package logger.
    """
    logger = colorlog.getLogger(LOGGER_NAME)
    level = cli_log_level(arguments)

    # main() may run several times in one process (tests)
    for handler in list(logger.handlers):
        if isinstance(handler, TqdmLoggingHandler):
            logger.removeHandler(handler)

    if level == logging.DEBUG:
        fmt = "%(log_color)s%(levelname)s [%(module)s]: %(message)s"
    else:
        fmt = "%(log_color)s%(levelname)s: %(message)s"

    handler = TqdmLoggingHandler()
    handler.setFormatter(colorlog.ColoredFormatter(fmt, log_colors=LOG_COLORS))
    logger.addHandler(handler)
    logger.setLevel(level)
    return logger
