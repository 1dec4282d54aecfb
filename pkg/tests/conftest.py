"""Shared fixtures; redirects all on-disk state into a temporary directory."""

from __future__ import annotations

import os
import tempfile

_STATE_DIR = tempfile.mkdtemp(prefix="atlas-tests-")
os.environ.setdefault("ATLAS_DATA_DIR", os.path.join(_STATE_DIR, "data"))
os.environ.setdefault("ATLAS_LOG_DIR", os.path.join(_STATE_DIR, "logs"))
os.environ.setdefault("ATLAS_OUTPUT_DIR", os.path.join(_STATE_DIR, "output"))
os.environ.setdefault("ATLAS_DB_PATH", os.path.join(_STATE_DIR, "data", "atlas.db"))
os.environ.setdefault("ATLAS_LOG_LEVEL", "WARNING")
os.environ.setdefault("ATLAS_WORKERS", "1")

import pytest  # noqa: E402


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte Carlo tests")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
