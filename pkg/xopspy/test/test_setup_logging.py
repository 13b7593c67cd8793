import logging

from xopspy.setup_logging import _parse_level, _PrettyFormatter, connect_formatter


def test_parse_level():
    assert _parse_level("debug") == logging.DEBUG
    assert _parse_level("WARNING") == logging.WARNING
    assert _parse_level("15") == 15
    assert _parse_level("loud") == logging.INFO


def test_connect_formatter_once():
    logger = logging.getLogger("xopspy.test.formatter")
    connect_formatter(logger)
    connect_formatter(logger)
    pretty = [h for h in logger.handlers if isinstance(h.formatter, _PrettyFormatter)]
    assert len(pretty) == 1
    logger.removeHandler(pretty[0])


def test_pretty_formatter():
    record = logging.LogRecord(
        "xopspy.darboux", logging.WARNING, "darboux.py", 12, "step %d", (2,), None
    )
    text = _PrettyFormatter().format(record)
    assert text.startswith("\x1b[33m")
    assert "WARNING  step 2" in text
    assert "@darboux:12" in text
