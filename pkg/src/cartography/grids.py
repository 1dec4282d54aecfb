"""Metric evaluation over grids of the (alpha, r) plane."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from config import Config
from errors import AtlasError, DomainError
from logger.app_logger import logger
from parametric import phi_factor, q0_param
from replica import ControlPoint, risk_report, solve_order_params, solve_ratios

FEASIBLE_METRICS = ("est_error", "q0", "Delta", "epsilon", "es_in_ratio")
RATIO_METRICS = ("delta", "zeta")
PARAMETRIC_METRICS = ("param_error",)
METRICS = FEASIBLE_METRICS + RATIO_METRICS + PARAMETRIC_METRICS

GRID_COLUMNS = ["alpha", "r", "value", "status"]

_LOG = {"component": "cartography"}


def _result(success: bool, data: dict[str, Any], error: Optional[str], error_type: Optional[str]) -> dict[str, Any]:
    return {
        "success": success,
        "data": data,
        "error": error,
        "error_type": error_type,
        "status": "ok" if success else error_type,
    }


def parse_grid(text: str) -> np.ndarray:
    """Parse ``LO:HI:STEP`` (inclusive) or a comma-separated list."""
    text = text.strip()
    if ":" not in text:
        try:
            values = np.array([float(part) for part in text.split(",") if part.strip()])
        except ValueError as exc:
            raise DomainError(f"cannot parse grid {text!r}") from exc
        if values.size == 0:
            raise DomainError("empty grid")
        return values

    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"expected LO:HI:STEP, got {text!r}")
    try:
        lo, hi, step = (float(part) for part in parts)
    except ValueError as exc:
        raise DomainError(f"cannot parse grid {text!r}") from exc
    if not step > 0.0 or hi < lo:
        raise DomainError(f"grid {text!r} needs STEP > 0 and HI >= LO")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # Rounded so that 0.5 + 475*0.001 prints as 0.975.
    return np.round(lo + step * np.arange(count), 12)


def check_increasing(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D grid")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    if arr.size > 1 and not np.all(np.diff(arr) > 0.0):
        raise DomainError(f"{name} must be strictly increasing")
    return arr


def metric_value(metric: str, alpha: float, r: float) -> float:
    """Value of one metric at (alpha, r); raises AtlasError subclasses."""
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    if not math.isfinite(r) or not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r}")

    if metric == "param_error":
        return math.sqrt(q0_param(alpha, r)) - 1.0

    p = ControlPoint(alpha, r)
    if metric in RATIO_METRICS:
        ratios = solve_ratios(p)
        return ratios.delta if metric == "delta" else ratios.zeta

    if alpha == 1.0:
        if metric == "Delta":
            raise DomainError("Delta is infinite at alpha = 1")
        report = risk_report(p)
        return {
            "est_error": report.est_error,
            "q0": report.es_out_ratio**2,
            "epsilon": report.var_proxy,
            "es_in_ratio": report.es_in_ratio,
        }[metric]

    op = solve_order_params(p, locate_boundary=False)
    if metric == "est_error":
        return math.sqrt(op.q0) - 1.0
    if metric == "es_in_ratio":
        return r / (op.Delta * (1.0 - alpha) * phi_factor(alpha))
    return float(getattr(op, metric))


def evaluate_cell(metric: str, alpha: float, r: float) -> dict[str, Any]:
    data: dict[str, Any] = {"alpha": float(alpha), "r": float(r), "value": None}
    try:
        data["value"] = metric_value(metric, float(alpha), float(r))
    except AtlasError as exc:
        return _result(False, data, str(exc), exc.error_type)
    return _result(True, data, None, None)


@dataclass
class MetricGrid:
    metric: str
    alphas: np.ndarray
    rs: np.ndarray
    values: np.ndarray
    status: np.ndarray
    cells: list[dict[str, Any]] = field(repr=False, default_factory=list)

    def rows(self) -> list[dict[str, Any]]:
        return [
            {"alpha": cell["data"]["alpha"], "r": cell["data"]["r"], "value": cell["data"]["value"], "status": cell["status"]}
            for cell in self.cells
        ]

    def status_counts(self) -> dict[str, int]:
        labels, counts = np.unique(self.status, return_counts=True)
        return {str(label): int(count) for label, count in zip(labels, counts)}


def _evaluate_row(metric: str, alpha: float, rs: Sequence[float]) -> list[dict[str, Any]]:
    return [evaluate_cell(metric, alpha, r) for r in rs]


def evaluate_grid(
    metric: str,
    alpha_grid: Sequence[float],
    r_grid: Sequence[float],
    workers: Optional[int] = None,
) -> MetricGrid:
    """Evaluate ``metric`` on the outer product of the grids.

    Cells that cannot be evaluated keep a NaN value and carry their status
    (``infeasible``, ``out_of_domain``, ``no_convergence``).
    """
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    alphas = check_increasing(alpha_grid, "alpha grid")
    rs = check_increasing(r_grid, "r grid")
    workers = Config.WORKERS if workers is None else workers

    logger.info("Grid %s: %s x %s cells", metric, alphas.size, rs.size, extra=_LOG)
    row_results: list[list[dict[str, Any]]] = []
    if workers > 1 and alphas.size > 1:
        try:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(_evaluate_row, metric, float(a), rs.tolist()) for a in alphas]
                row_results = [future.result() for future in futures]
        except (OSError, RuntimeError) as exc:
            logger.warning("Parallel grid failed (%s); evaluating sequentially", exc, extra=_LOG)
            row_results = []
    if not row_results:
        row_results = [_evaluate_row(metric, float(a), rs.tolist()) for a in alphas]

    values = np.full((alphas.size, rs.size), np.nan)
    status = np.empty((alphas.size, rs.size), dtype=object)
    cells: list[dict[str, Any]] = []
    for i, row in enumerate(row_results):
        for j, cell in enumerate(row):
            if cell["success"]:
                values[i, j] = cell["data"]["value"]
            status[i, j] = cell["status"]
            cells.append(cell)

    grid = MetricGrid(metric=metric, alphas=alphas, rs=rs, values=values, status=status, cells=cells)
    logger.debug("Grid %s statuses: %s", metric, grid.status_counts(), extra=_LOG)
    return grid
