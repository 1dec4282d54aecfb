"""SQLite store for run records, ensemble samples and log records."""

from __future__ import annotations

import json
import os
import sqlite3
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from threading import Lock
from typing import Any, Iterable, Optional

from config import Config
from storage.models import schema_statements


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Database:
    path: str
    _conn: Optional[sqlite3.Connection] = None
    _lock: Lock = field(default_factory=Lock)
    _pid: Optional[int] = None

    def connect(self) -> sqlite3.Connection:
        # A connection must not cross a fork into a worker process.
        if self._conn is None or self._pid != os.getpid():
            self._pid = os.getpid()
            self._lock = Lock()
            Path(self.path).parent.mkdir(parents=True, exist_ok=True)
            self._conn = sqlite3.connect(self.path, timeout=10, check_same_thread=False)
            self._conn.row_factory = sqlite3.Row
        return self._conn

    def initialize(self) -> None:
        conn = self.connect()
        with self._lock:
            for stmt in schema_statements():
                conn.execute(stmt)
            conn.commit()

    def _execute(
        self, query: str, params: Iterable[Any] | None = None
    ) -> sqlite3.Cursor:
        conn = self.connect()
        with self._lock:
            cursor = conn.execute(query, params or [])
            conn.commit()
        return cursor

    def log_run(self, data: dict[str, Any]) -> int:
        cursor = self._execute(
            """
            INSERT INTO runs (
                timestamp, command, config, seed, tool_version,
                status, exit_code, artifact_path, duration_ms, notes
            ) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """,
            [
                data.get("timestamp", _utc_now()),
                data["command"],
                json.dumps(data.get("config", {}), sort_keys=True),
                data.get("seed"),
                data.get("tool_version", Config.VERSION),
                data.get("status", "started"),
                data.get("exit_code"),
                data.get("artifact_path"),
                data.get("duration_ms"),
                data.get("notes"),
            ],
        )
        return int(cursor.lastrowid)

    def update_run(self, run_id: int, updates: dict[str, Any]) -> None:
        if not updates:
            return

        fields = []
        values = []
        for key, value in updates.items():
            fields.append(f"{key} = ?")
            values.append(value)
        values.append(run_id)

        self._execute(
            f"UPDATE runs SET {', '.join(fields)} WHERE id = ?",
            values,
        )

    def log_ensemble_samples(self, run_id: int, rows: list[dict[str, Any]]) -> int:
        conn = self.connect()
        with self._lock:
            conn.executemany(
                """
                INSERT INTO ensemble_samples (
                    run_id, sample_index, status,
                    q0_hat, est_error_hat, epsilon_hat, es_in_ratio, degenerate
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                """,
                [
                    (
                        run_id,
                        row["index"],
                        row["status"],
                        row.get("q0_hat"),
                        row.get("est_error_hat"),
                        row.get("epsilon_hat"),
                        row.get("es_in_ratio"),
                        row.get("degenerate"),
                    )
                    for row in rows
                ],
            )
            conn.commit()
        return len(rows)

    def log_meta_log(
        self,
        *,
        level: str,
        component: str,
        message: str,
        details: Optional[dict[str, Any]] = None,
        run_id: Optional[int] = None,
        error_type: Optional[str] = None,
    ) -> int:
        cursor = self._execute(
            """
            INSERT INTO meta_logs (
                timestamp, level, component, message,
                details, run_id, error_type
            ) VALUES (?, ?, ?, ?, ?, ?, ?)
            """,
            [
                _utc_now(),
                level,
                component,
                message,
                json.dumps(details, default=str) if details else None,
                run_id,
                error_type,
            ],
        )
        return int(cursor.lastrowid)

    def get_recent_runs(self, limit: int = 20) -> list[sqlite3.Row]:
        cursor = self._execute(
            "SELECT * FROM runs ORDER BY id DESC LIMIT ?",
            [limit],
        )
        return list(cursor.fetchall())

    def get_run_samples(self, run_id: int) -> list[sqlite3.Row]:
        cursor = self._execute(
            "SELECT * FROM ensemble_samples WHERE run_id = ? ORDER BY sample_index",
            [run_id],
        )
        return list(cursor.fetchall())

    def get_run_logs(self, run_id: int) -> list[sqlite3.Row]:
        cursor = self._execute(
            "SELECT * FROM meta_logs WHERE run_id = ? ORDER BY id",
            [run_id],
        )
        return list(cursor.fetchall())

    def clear_all(self) -> None:
        self._execute("DELETE FROM ensemble_samples")
        self._execute("DELETE FROM runs")
        self._execute("DELETE FROM meta_logs")


db = Database(Config.DB_PATH)
