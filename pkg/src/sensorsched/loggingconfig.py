"""Root logger setup for sensorsched.

Importing this module installs a single stderr handler on the root logger. Modules then log
through ``logging.getLogger(__name__)`` as usual.

The level comes from the ``-v`` count (``-v`` INFO, ``-vv`` DEBUG). Without ``-v`` it is read
from ``LOG_LEVEL`` in the .env file, and WARNING otherwise.
"""

import logging
import sys
from argparse import ArgumentParser
from typing import Optional

from sensorsched import config

# Shared as a parent by the CLI parser, so no -h here.
parser = ArgumentParser(add_help=False)
parser.add_argument(
    "-v",
    "--verbose",
    action="count",
    default=0,
    help="log more (-v INFO, -vv DEBUG)",
)

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s:%(lineno)d - %(message)s"

_VERBOSITY_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]

_COLOURS = {
    logging.WARNING: "\x1b[33;20m",
    logging.ERROR: "\x1b[31;20m",
    logging.CRITICAL: "\x1b[31;1m",
}
_RESET = "\x1b[0m"


class LevelColourFormatter(logging.Formatter):
    """Colours WARNING and above when writing to a terminal."""

    def __init__(self, fmt: str = LOG_FORMAT, colour: bool = True):
        super().__init__(fmt)
        self._by_level: dict[int, logging.Formatter] = {}
        if colour:
            for level, code in _COLOURS.items():
                self._by_level[level] = logging.Formatter(f"{code}{fmt}{_RESET}")

    def format(self, record: logging.LogRecord) -> str:
        formatter = self._by_level.get(record.levelno)
        return formatter.format(record) if formatter else super().format(record)


def _env_level() -> int:
    name = (config.get_config("LOG_LEVEL") or "").upper()
    level = logging.getLevelName(name) if name else logging.WARNING
    return level if isinstance(level, int) else logging.WARNING


def level_for(verbosity: int) -> int:
    if verbosity <= 0:
        return _env_level()
    return _VERBOSITY_LEVELS[min(verbosity, len(_VERBOSITY_LEVELS) - 1)]


def get_logger(name: Optional[str] = None) -> logging.Logger:
    return logging.getLogger(name)


def set_verbosity(verbosity: int) -> None:
    """Re-apply the level once the CLI has parsed its own -v flags."""
    root_logger.setLevel(level_for(verbosity))


_args, _ = parser.parse_known_args()

handler = logging.StreamHandler()
handler.setFormatter(LevelColourFormatter(colour=sys.stderr.isatty()))

root_logger = logging.getLogger()
root_logger.setLevel(level_for(_args.verbose))
root_logger.addHandler(handler)

logging.getLogger(__name__).debug(
    f"Root logger at {logging.getLevelName(root_logger.level)}"
)
