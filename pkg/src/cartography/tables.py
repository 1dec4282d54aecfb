"""Sample-length requirements: T/N needed for a given relative ES error."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from scipy.optimize import brentq

from cartography.contours import BOUNDARY_MARGIN, ESTIMATORS, R_FLOOR
from config import Config
from errors import AtlasError, DomainError
from logger.app_logger import logger
from parametric import contour_r_param, round_half_away
from replica import ControlPoint, phase_boundary, solve_order_params

_LOG = {"component": "cartography"}


@dataclass
class AspectTable:
    estimator: str
    error_levels: list[float]
    alphas: list[float]
    entries: list[list[Optional[int]]]
    raw: list[list[Optional[float]]]
    status: list[list[str]] = field(default_factory=list)

    def entry(self, error: float, alpha: float) -> Optional[int]:
        return self.entries[self.error_levels.index(error)][self.alphas.index(alpha)]

    @property
    def columns(self) -> list[str]:
        return ["error"] + [f"{a:g}" for a in self.alphas]

    def rows(self) -> list[dict[str, Any]]:
        rows = []
        for error, values in zip(self.error_levels, self.entries):
            row: dict[str, Any] = {"error": f"{round(100 * error):d}%"}
            row.update({f"{a:g}": v for a, v in zip(self.alphas, values)})
            rows.append(row)
        return rows

    def to_dict(self) -> dict[str, Any]:
        return {
            "estimator": self.estimator,
            "error_levels": self.error_levels,
            "alphas": self.alphas,
            "entries": self.entries,
            "raw": self.raw,
            "status": self.status,
        }


def historical_contour_r(alpha: float, error: float, boundary: Optional[float] = None) -> float:
    """Aspect ratio where sqrt(q0) - 1 = error for the historical estimate."""
    if not error > 0.0:
        raise DomainError(f"error level must be positive, got {error}")
    if boundary is None:
        boundary = phase_boundary(alpha)

    def gap(r: float) -> float:
        op = solve_order_params(ControlPoint(alpha, r), locate_boundary=False)
        return math.sqrt(op.q0) - 1.0 - error

    hi = boundary * (1.0 - BOUNDARY_MARGIN)
    return float(brentq(gap, R_FLOOR, hi, xtol=1e-15, rtol=1e-13, maxiter=Config.MAX_ITER))


def parametric_contour_r(alpha: float, error: float) -> float:
    if not error > 0.0:
        raise DomainError(f"error level must be positive, got {error}")
    return contour_r_param(alpha, (1.0 + error) ** 2)


def required_aspect_table(
    estimator: str,
    error_levels: Optional[Sequence[float]] = None,
    alphas: Optional[Sequence[float]] = None,
) -> AspectTable:
    """Rounded T/N giving each relative error at each confidence level."""
    if estimator not in ESTIMATORS:
        raise DomainError(f"unknown estimator {estimator!r}; choose from {', '.join(ESTIMATORS)}")
    errors = [float(e) for e in (error_levels or Config.TABLE_ERRORS)]
    levels = [float(a) for a in (alphas or Config.TABLE_ALPHAS)]
    if any(not e > 0.0 for e in errors):
        raise DomainError("error levels must be positive")

    boundaries: dict[float, Any] = {}
    if estimator == "historical":
        for alpha in levels:
            try:
                boundaries[alpha] = phase_boundary(alpha)
            except AtlasError as exc:
                boundaries[alpha] = exc

    entries: list[list[Optional[int]]] = []
    raw: list[list[Optional[float]]] = []
    status: list[list[str]] = []
    for error in errors:
        entry_row: list[Optional[int]] = []
        raw_row: list[Optional[float]] = []
        status_row: list[str] = []
        for alpha in levels:
            try:
                if estimator == "historical":
                    boundary = boundaries[alpha]
                    if isinstance(boundary, AtlasError):
                        raise boundary
                    r = historical_contour_r(alpha, error, boundary)
                else:
                    r = parametric_contour_r(alpha, error)
            except AtlasError as exc:
                logger.warning("Table cell (%s, %s) failed: %s", error, alpha, exc, extra=_LOG)
                entry_row.append(None)
                raw_row.append(None)
                status_row.append(exc.error_type)
                continue
            entry_row.append(round_half_away(1.0 / r))
            raw_row.append(1.0 / r)
            status_row.append("ok")
        entries.append(entry_row)
        raw.append(raw_row)
        status.append(status_row)

    logger.info("Built %s table: %s x %s", estimator, len(errors), len(levels), extra=_LOG)
    return AspectTable(
        estimator=estimator,
        error_levels=errors,
        alphas=levels,
        entries=entries,
        raw=raw,
        status=status,
    )


def compare_estimators(alpha: float, error: float) -> dict[str, Any]:
    """How many more observations the historical estimate needs than the parametric one."""
    historical = historical_contour_r(alpha, error)
    parametric = parametric_contour_r(alpha, error)
    return {
        "alpha": alpha,
        "error": error,
        "historical_r": historical,
        "parametric_r": parametric,
        "historical_tn": round_half_away(1.0 / historical),
        "parametric_tn": round_half_away(1.0 / parametric),
        "sample_ratio": parametric / historical,
    }
