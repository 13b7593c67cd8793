# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Create a default log handler when xopspy is imported.

The level is read from ``XOPSPY_LOGLEVEL`` (a level name such as ``DEBUG`` or a
number). Exact-identity checks log at DEBUG, chain steps and verdicts at INFO.
"""

import logging
import os

_COLORS = {
    logging.DEBUG: "\x1b[90m",
    logging.WARNING: "\x1b[33m",
    logging.ERROR: "\x1b[31m",
    logging.CRITICAL: "\x1b[31;1m",
}
_RESET = "\x1b[0m"


class _PrettyFormatter(logging.Formatter):
    """Colored formatter: one line per record, module name dimmed at the end."""

    time_format = "%H:%M:%S"

    def __init__(self):
        super().__init__()
        formatstr = (
            "%(asctime)s %(levelname)-8s %(message)s "
            f"{_COLORS[logging.DEBUG]}@%(module)s:%(lineno)d{_RESET}"
        )
        self._formatters = {
            level: logging.Formatter(
                _COLORS.get(level, "") + formatstr, self.time_format
            )
            for level in (
                logging.DEBUG,
                logging.INFO,
                logging.WARNING,
                logging.ERROR,
                logging.CRITICAL,
            )
        }

    def format(self, record):
        formatter = self._formatters.get(record.levelno, self._formatters[logging.INFO])
        return formatter.format(record)


def _parse_level(value: str) -> int:
    if value.isdigit():
        return int(value)
    level = logging.getLevelName(value.upper())
    return level if isinstance(level, int) else logging.INFO


def connect_formatter(logger: logging.Logger) -> None:
    """Attach the colored stream handler to ``logger`` (once)."""
    for handler in logger.handlers:
        if isinstance(handler.formatter, _PrettyFormatter):
            return
    ch = logging.StreamHandler()
    ch.setLevel(logging.DEBUG)
    ch.setFormatter(_PrettyFormatter())
    logger.addHandler(ch)


logger = logging.getLogger("xopspy")
connect_formatter(logger)
logger.setLevel(_parse_level(os.getenv("XOPSPY_LOGLEVEL") or "INFO"))
