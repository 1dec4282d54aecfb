"""Configuration defaults for Shortfall Atlas."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any

import psutil


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return int(value)
    except ValueError:
        return default


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if value is None:
        return default
    try:
        return float(value)
    except ValueError:
        return default


def _env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _default_workers() -> int:
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


class Config:
    VERSION = "0.3.0"

    BASE_DIR = Path(__file__).resolve().parents[1]
    DATA_DIR = os.getenv("ATLAS_DATA_DIR", str(BASE_DIR / "data"))
    LOG_DIR = os.getenv("ATLAS_LOG_DIR", str(BASE_DIR / "logs"))
    OUTPUT_DIR = os.getenv("ATLAS_OUTPUT_DIR", str(BASE_DIR / "output"))
    DB_PATH = os.getenv("ATLAS_DB_PATH", str(Path(DATA_DIR) / "atlas.db"))

    LOG_LEVEL = os.getenv("ATLAS_LOG_LEVEL", "INFO").upper()
    LOG_RETENTION_DAYS = _env_int("ATLAS_LOG_RETENTION_DAYS", 7)
    RECORD_RUNS = _env_bool("ATLAS_RECORD_RUNS", True)

    # Replica solver
    RESIDUAL_TOL = _env_float("ATLAS_RESIDUAL_TOL", 1e-10)
    RATIO_TOL = _env_float("ATLAS_RATIO_TOL", 1e-12)
    STEP_TOL = _env_float("ATLAS_STEP_TOL", 1e-12)
    MAX_ITER = _env_int("ATLAS_MAX_ITER", 200)
    DELTA_CEILING = _env_float("ATLAS_DELTA_CEILING", 1e12)

    # Cartography
    CONTOUR_TOL = _env_float("ATLAS_CONTOUR_TOL", 1e-6)
    DEFAULT_ALPHA_GRID = os.getenv("ATLAS_ALPHA_GRID", "0.50:0.999:0.001")
    DEFAULT_LEVELS = [0.02, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0]
    TABLE_ALPHAS = [0.7, 0.8, 0.9, 0.91, 0.92, 0.93, 0.94, 0.95, 0.96, 0.97, 0.975, 0.98]
    TABLE_ERRORS = [0.05, 0.10, 0.15, 0.20, 0.25, 0.50]

    # Monte Carlo
    DEFAULT_SEED = _env_int("ATLAS_SEED", 20160301)
    DEFAULT_SAMPLES = _env_int("ATLAS_SAMPLES", 500)
    DEFAULT_SHIFT = _env_float("ATLAS_SHIFT", 1e-3)
    LP_METHOD = os.getenv("ATLAS_LP_METHOD", "highs")
    WORKERS = _env_int("ATLAS_WORKERS", _default_workers())

    @classmethod
    def tolerances(cls) -> dict[str, Any]:
        return {
            "residual_tol": cls.RESIDUAL_TOL,
            "ratio_tol": cls.RATIO_TOL,
            "step_tol": cls.STEP_TOL,
            "max_iter": cls.MAX_ITER,
            "delta_ceiling": cls.DELTA_CEILING,
            "contour_tol": cls.CONTOUR_TOL,
        }
