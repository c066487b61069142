"""Logging setup for command-line entry points."""

from __future__ import annotations

import logging
import sys

from pythonjsonlogger import jsonlogger

from .config import SolverSettings

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
JSON_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def configure_logging(settings: SolverSettings) -> None:
    """
    Install a single stderr handler on the root logger.

    Text mode mirrors the classic ``asctime - name - level - message`` layout; JSON mode
    turns every ``extra={...}`` payload attached by the solvers into top-level keys.
    """
    handler = logging.StreamHandler(sys.stderr)
    if settings.log_format == "json":
        handler.setFormatter(jsonlogger.JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(settings.log_level)
