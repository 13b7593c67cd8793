# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Helper functions for the xopspy command line interface."""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click
from rich.logging import RichHandler

from xopspy.exception import IdentityViolation
from xopspy.serialize import loads

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL = 3


def setup_rich_log_handler(quiet: bool):
    """Setup rich.logging.RichHandler on the root logger.

    Args:
        quiet: When True: set log level of the `xopspy` logger to WARNING or higher.
    """
    # Disable default xopspy log handler
    xopspy_logger = logging.getLogger("xopspy")
    for handler in list(xopspy_logger.handlers):
        xopspy_logger.removeHandler(handler)
    # Disable any root log handlers
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        root_logger.removeHandler(handler)
    # Log to stderr so that documents written to stdout stay parseable
    root_logger.addHandler(RichHandler(console=_stderr_console()))
    if quiet:
        xopspy_logger.setLevel(max(logging.WARNING, xopspy_logger.getEffectiveLevel()))


def _stderr_console():
    from rich.console import Console

    return Console(stderr=True)


def read_document(source: str) -> Tuple[str, dict]:
    """Read a JSON document given inline (starting with ``{``) or as a file path.

    Returns:
        The raw text and the parsed document.

    Raises:
        PreconditionError: for malformed JSON, via :func:`xopspy.serialize.loads`.
        click.BadParameter: if the file does not exist.
    """
    if source.lstrip().startswith("{"):
        text = source
    else:
        path = Path(source)
        if not path.is_file():
            raise click.BadParameter(f"No such file: {source}", param_hint="INPUT")
        text = path.read_text(encoding="utf-8")
    return text, loads(text)


def write_output(text: str, out: Optional[str]) -> None:
    """Write a document to ``out`` or to standard output (LF line endings, UTF-8)."""
    if out is None:
        click.echo(text, nl=False)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    logger.info("Wrote %s", out)


def exit_code_contract(func):
    """Map exceptions of a command to the exit codes.

    ``IdentityViolation`` exits with 3, any other ``ValueError`` (invalid input or
    unmet precondition) with 2, and failures of numeric computations with 1.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except IdentityViolation as exc:
            click.echo(f"Internal verification failure: {exc}", err=True)
            sys.exit(EXIT_INTERNAL)
        except click.ClickException:
            raise
        except ValueError as exc:
            click.echo(f"Invalid input: {exc}", err=True)
            sys.exit(EXIT_INPUT_ERROR)
        except RuntimeError as exc:
            click.echo(f"Check failed: {exc}", err=True)
            sys.exit(EXIT_CHECK_FAILED)

    return wrapper
