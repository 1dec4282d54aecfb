"""Closed-form error of parametric (Gaussian-fit) ES estimates."""

from __future__ import annotations

import math

from errors import DomainError, InfeasibleRegion
from specfun import norm_cdf_inv, norm_pdf


def _check_alpha(alpha: float) -> None:
    if not math.isfinite(alpha) or not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def round_half_away(value: float) -> int:
    if value >= 0:
        return int(math.floor(value + 0.5))
    return -int(math.floor(-value + 0.5))


def phi_factor(alpha: float) -> float:
    """ES of a unit-variance Gaussian position at confidence alpha."""
    _check_alpha(alpha)
    c = norm_cdf_inv(alpha)
    return norm_pdf(c) / (1.0 - alpha)


def r_crit_param(alpha: float) -> float:
    phi2 = phi_factor(alpha) ** 2
    return phi2 / (1.0 + phi2)


def q0_param(alpha: float, r: float) -> float:
    rc = r_crit_param(alpha)
    if not math.isfinite(r) or r < 0.0:
        raise DomainError(f"r must be non-negative, got {r}")
    if r >= rc:
        raise InfeasibleRegion(
            f"r={r} is at or beyond the parametric boundary r_c={rc:.10g}",
            boundary=rc,
        )
    return rc / (rc - r)


def q0_param_phi_form(alpha: float, r: float) -> float:
    # Same quantity written through phi^2; kept as an independent check.
    phi2 = phi_factor(alpha) ** 2
    denom = (1.0 - r) * phi2 - r
    if denom <= 0.0:
        raise InfeasibleRegion("parametric estimate diverges", boundary=r_crit_param(alpha))
    return phi2 / denom


def contour_r_param(alpha: float, q0: float) -> float:
    if not math.isfinite(q0) or q0 < 1.0:
        raise DomainError(f"q0 must be >= 1, got {q0}")
    return (q0 - 1.0) / q0 * r_crit_param(alpha)


def required_horizon(alpha: float, error: float, n_assets: int) -> int:
    """Sample length T giving relative error sqrt(q0) - 1 = error for N assets."""
    if error <= 0.0:
        raise DomainError(f"error level must be positive, got {error}")
    if n_assets < 1:
        raise DomainError(f"n_assets must be >= 1, got {n_assets}")
    r = contour_r_param(alpha, (1.0 + error) ** 2)
    return round_half_away(n_assets / r)
