"""Level sets of solver metrics and phase boundaries in the (alpha, r) plane."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from cartography.grids import FEASIBLE_METRICS, METRICS, check_increasing, metric_value
from config import Config
from errors import AtlasError, DomainError, EmptyContour
from logger.app_logger import logger
from parametric import contour_r_param, r_crit_param
from replica import phase_boundary

ESTIMATORS = ("historical", "parametric")
CONTOUR_COLUMNS = ["alpha", "r", "metric", "level", "branch"]

R_FLOOR = 1e-8
BOUNDARY_MARGIN = 1e-6
SCAN_POINTS = 120

_LOG = {"component": "cartography"}


@dataclass
class ContourLine:
    metric: str
    level: float
    points: list[tuple[float, float, int]] = field(default_factory=list)
    branch_counts: dict[float, int] = field(default_factory=dict)
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def rs(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def branch(self, index: int) -> list[tuple[float, float]]:
        return [(a, r) for a, r, b in self.points if b == index]

    def r_at(self, alpha: float, branch: int = 0) -> Optional[float]:
        for a, r, b in self.points:
            if b == branch and abs(a - alpha) <= 1e-12:
                return r
        return None

    def rows(self) -> list[dict[str, Any]]:
        return [
            {"alpha": a, "r": r, "metric": self.metric, "level": self.level, "branch": b}
            for a, r, b in self.points
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric": self.metric,
            "level": self.level,
            "points": self.rows(),
            "branch_counts": {f"{a:.12g}": n for a, n in self.branch_counts.items()},
            "failures": self.failures,
        }


def _scan_range(metric: str, alpha: float) -> tuple[float, float]:
    if metric in FEASIBLE_METRICS:
        hi = phase_boundary(alpha) * (1.0 - BOUNDARY_MARGIN)
    else:
        hi = 1.0 - BOUNDARY_MARGIN
    return R_FLOOR, hi


def _scan_grid(lo: float, hi: float, points: int) -> np.ndarray:
    # Log spacing resolves the r -> 0 end, linear spacing the boundary end.
    half = max(points // 2, 2)
    return np.unique(np.concatenate([np.geomspace(lo, hi, half), np.linspace(lo, hi, half)]))


def _roots_along_r(
    gap: Callable[[float], float],
    lo: float,
    hi: float,
    points: int,
) -> list[float]:
    grid = _scan_grid(lo, hi, points)
    values = []
    for r in grid:
        try:
            values.append(gap(float(r)))
        except AtlasError:
            values.append(math.nan)

    roots: list[float] = []
    for k in range(grid.size - 1):
        left, right = values[k], values[k + 1]
        if not (math.isfinite(left) and math.isfinite(right)):
            continue
        if left == 0.0:
            roots.append(float(grid[k]))
            continue
        if left * right < 0.0:
            a, b = float(grid[k]), float(grid[k + 1])
            try:
                root = brentq(gap, a, b, xtol=1e-15, rtol=4.0 * np.finfo(float).eps, maxiter=Config.MAX_ITER)
            except (AtlasError, RuntimeError) as exc:
                logger.debug("Bracket [%s, %s] abandoned: %s", a, b, exc, extra=_LOG)
                continue
            roots.append(float(root))
    if math.isfinite(values[-1]) and values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def trace_contour(
    metric: str,
    level: float,
    alpha_grid: Sequence[float],
    scan_points: int = SCAN_POINTS,
) -> ContourLine:
    """Trace the level set ``metric(alpha, r) = level`` column by column.

    Each alpha is scanned in r for sign changes and every bracket is refined
    with Brent's method, so metrics that bend over (Delta) yield one branch
    per root. Branch 0 is the smallest r.
    """
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    if not math.isfinite(level):
        raise DomainError(f"level must be finite, got {level}")
    alphas = check_increasing(alpha_grid, "alpha grid")
    line = ContourLine(metric=metric, level=float(level))
    tol = Config.CONTOUR_TOL * max(1.0, abs(level))

    for alpha in alphas.tolist():
        try:
            if metric == "param_error":
                roots = [] if level <= 0.0 else [contour_r_param(alpha, (1.0 + level) ** 2)]
            else:
                lo, hi = _scan_range(metric, alpha)
                roots = _roots_along_r(lambda r: metric_value(metric, alpha, r) - level, lo, hi, scan_points)
        except AtlasError as exc:
            line.failures.append({"alpha": alpha, "error": str(exc), "error_type": exc.error_type})
            logger.debug("Contour %s=%s skipped alpha=%s: %s", metric, level, alpha, exc, extra=_LOG)
            continue

        kept = 0
        for r in roots:
            try:
                miss = abs(metric_value(metric, alpha, r) - level)
            except AtlasError:
                continue
            if miss > tol:
                logger.warning(
                    "Contour %s=%s point (%s, %s) misses level by %.3g; dropped",
                    metric,
                    level,
                    alpha,
                    r,
                    miss,
                    extra=_LOG,
                )
                continue
            line.points.append((alpha, r, kept))
            kept += 1
        if kept:
            line.branch_counts[alpha] = kept

    if not line.points:
        raise EmptyContour(f"no alpha in the grid brackets {metric}={level}")
    logger.info(
        "Contour %s=%s: %s points over %s alphas",
        metric,
        level,
        len(line.points),
        len(line.branch_counts),
        extra=_LOG,
    )
    return line


def phase_boundary_curve(estimator: str, alpha_grid: Sequence[float]) -> ContourLine:
    """Critical r per alpha, as a contour where the error diverges."""
    if estimator not in ESTIMATORS:
        raise DomainError(f"unknown estimator {estimator!r}; choose from {', '.join(ESTIMATORS)}")
    alphas = check_increasing(alpha_grid, "alpha grid")
    boundary = phase_boundary if estimator == "historical" else r_crit_param
    metric = "est_error" if estimator == "historical" else "param_error"
    line = ContourLine(metric=metric, level=math.inf)

    for alpha in alphas.tolist():
        try:
            r = boundary(alpha)
        except AtlasError as exc:
            line.failures.append({"alpha": alpha, "error": str(exc), "error_type": exc.error_type})
            logger.warning("Boundary (%s) failed at alpha=%s: %s", estimator, alpha, exc, extra=_LOG)
            continue
        line.points.append((alpha, float(r), 0))
        line.branch_counts[alpha] = 1

    if not line.points:
        raise EmptyContour(f"{estimator} boundary could not be located on the grid")
    return line
