"""Render command results as deterministic CSV or JSON artifacts."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from config import Config


def _plain(value: Any) -> Any:
    """Convert numpy scalars and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            return None
        return "inf" if value > 0 else "-inf"
    return value


def _cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def build_metadata(command: str, config: dict[str, Any]) -> dict[str, Any]:
    return {
        "tool": "shortfall-atlas",
        "tool_version": Config.VERSION,
        "command": command,
        "config": _plain(config),
        "seed": config.get("seed"),
        "tolerances": Config.tolerances(),
    }


def render_json(payload: dict[str, Any]) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_csv(
    rows: Iterable[dict[str, Any]],
    columns: Sequence[str],
    metadata: Optional[dict[str, Any]] = None,
) -> str:
    buffer = io.StringIO()
    if metadata:
        for key in sorted(metadata):
            value = metadata[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(_plain(value), sort_keys=True)
            buffer.write(f"# {key}: {_cell(value)}\n")

    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in columns])
    return buffer.getvalue()


def emit(text: str, out_path: Optional[str] = None) -> Optional[Path]:
    if not out_path:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None

    path = Path(out_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path
