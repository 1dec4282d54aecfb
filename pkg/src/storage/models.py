"""SQLite schema definitions."""

RUNS_TABLE = """
CREATE TABLE IF NOT EXISTS runs (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    timestamp TEXT NOT NULL,
    command TEXT NOT NULL,

    config TEXT NOT NULL,
    seed INTEGER,
    tool_version TEXT,

    status TEXT,
    exit_code INTEGER,
    artifact_path TEXT,
    duration_ms INTEGER,

    notes TEXT
);
"""

ENSEMBLE_SAMPLES_TABLE = """
CREATE TABLE IF NOT EXISTS ensemble_samples (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    run_id INTEGER NOT NULL,
    sample_index INTEGER NOT NULL,
    status TEXT NOT NULL,

    q0_hat REAL,
    est_error_hat REAL,
    epsilon_hat REAL,
    es_in_ratio REAL,
    degenerate BOOLEAN,

    FOREIGN KEY (run_id) REFERENCES runs(id)
);
"""

META_LOGS_TABLE = """
CREATE TABLE IF NOT EXISTS meta_logs (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    timestamp TEXT NOT NULL,
    level TEXT,
    component TEXT,
    message TEXT,
    details TEXT,
    run_id INTEGER,
    error_type TEXT
);
"""

SAMPLES_INDEX = """
CREATE INDEX IF NOT EXISTS idx_samples_run ON ensemble_samples (run_id, sample_index);
"""


def schema_statements() -> list[str]:
    return [
        RUNS_TABLE,
        ENSEMBLE_SAMPLES_TABLE,
        META_LOGS_TABLE,
        SAMPLES_INDEX,
    ]
