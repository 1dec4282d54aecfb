"""Logger shared by the solvers, the simulator and the CLI."""

from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from contextvars import ContextVar
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path
from typing import Any, Iterator, Optional

from config import Config
from logger.formatters import build_console_formatter, build_file_formatter
from storage.database import db

LOGGER_NAME = "shortfall_atlas"

_current_run: ContextVar[Optional[int]] = ContextVar("current_run", default=None)
_OWNER_PID = os.getpid()


@contextmanager
def run_context(run_id: Optional[int]) -> Iterator[None]:
    """Attach ``run_id`` to every record logged inside the block."""
    token = _current_run.set(run_id)
    try:
        yield
    finally:
        _current_run.reset(token)


class SQLiteHandler(logging.Handler):
    """Persist records to the meta_logs table, keyed to the active run."""

    def emit(self, record: logging.LogRecord) -> None:
        # Pool workers inherit the handler but not a usable connection.
        if record.process != _OWNER_PID:
            return
        try:
            details: Optional[dict[str, Any]] = None
            if isinstance(getattr(record, "details", None), dict):
                details = record.details

            run_id = getattr(record, "run_id", None)
            db.log_meta_log(
                level=record.levelname,
                component=getattr(record, "component", record.name),
                message=record.getMessage(),
                details=details,
                run_id=run_id if run_id is not None else _current_run.get(),
                error_type=getattr(record, "error_type", None),
            )
        except Exception:
            pass


def set_level(level: str) -> None:
    """Override the configured level on the logger and its handlers."""
    level = level.upper()
    log = logging.getLogger(LOGGER_NAME)
    log.setLevel(level)
    for handler in log.handlers:
        if isinstance(handler, SQLiteHandler):
            handler.setLevel(max(logging.INFO, logging.getLevelName(level)))
        else:
            handler.setLevel(level)


def setup_logger() -> logging.Logger:
    log = logging.getLogger(LOGGER_NAME)
    if log.handlers:
        return log

    log.setLevel(Config.LOG_LEVEL)
    db.initialize()

    # stderr only; stdout carries the artifacts.
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(build_console_formatter())

    log_dir = Path(Config.LOG_DIR)
    log_dir.mkdir(parents=True, exist_ok=True)
    file_handler = TimedRotatingFileHandler(
        log_dir / "atlas.log",
        when="midnight",
        backupCount=Config.LOG_RETENTION_DAYS,
        encoding="utf-8",
    )
    file_handler.setFormatter(build_file_formatter())

    log.addHandler(console_handler)
    log.addHandler(file_handler)
    log.addHandler(SQLiteHandler())
    log.propagate = False
    set_level(Config.LOG_LEVEL)
    return log


logger = setup_logger()
