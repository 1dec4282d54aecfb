from __future__ import annotations

import logging

from logger.app_logger import LOGGER_NAME, SQLiteHandler, logger, run_context
from storage.database import db


def test_logger_is_configured_once() -> None:
    assert logger.name == LOGGER_NAME
    assert not logger.propagate
    kinds = {type(h) for h in logger.handlers}
    assert SQLiteHandler in kinds
    assert len(logger.handlers) == 3


def test_records_inherit_the_active_run() -> None:
    run_id = db.log_run({"command": "grid"})
    with run_context(run_id):
        logger.warning("cell failed", extra={"component": "cartography", "details": {"alpha": 0.9}})
    logger.warning("outside any run", extra={"component": "cartography"})

    rows = db.get_run_logs(run_id)
    assert [row["message"] for row in rows] == ["cell failed"]
    assert rows[0]["component"] == "cartography"
    assert rows[0]["level"] == "WARNING"


def test_explicit_run_id_wins() -> None:
    first = db.log_run({"command": "solve"})
    second = db.log_run({"command": "solve"})
    with run_context(first):
        logger.error("boom", extra={"run_id": second, "error_type": "numerical"})
    assert db.get_run_logs(first) == []
    (row,) = db.get_run_logs(second)
    assert row["error_type"] == "numerical"


def test_records_below_the_level_are_not_stored() -> None:
    run_id = db.log_run({"command": "slice"})
    assert logger.getEffectiveLevel() >= logging.WARNING
    with run_context(run_id):
        logger.info("quiet")
    assert db.get_run_logs(run_id) == []
