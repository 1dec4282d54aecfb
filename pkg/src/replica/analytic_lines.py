"""Closed-form and perturbative solutions along special lines of the plane.

These serve two purposes: fast paths where the generic solver is not needed,
and independent oracles for it.
"""

from __future__ import annotations

import math

from errors import DomainError
from replica.models import MinimaxSolution, OrderParameters
from specfun import norm_cdf_inv, norm_pdf

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _check_open_half(r: float, name: str) -> None:
    if not math.isfinite(r) or not 0.0 < r < 0.5:
        raise DomainError(f"{name} requires 0 < r < 1/2, got r={r}")


def small_r_expansion(alpha: float, r: float) -> OrderParameters:
    """First-order corrections around the r = 0 axis.

    The q0 coefficient is 2*pi*r*exp(c^2)*(1 - alpha) with c = Phi^-1(alpha);
    it is what expanding the reduced saddle-point system to first order in r
    yields, and agrees with the exact alpha = 1/2 line.
    """
    if not math.isfinite(alpha) or not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not math.isfinite(r) or r < 0.0:
        raise DomainError(f"r must be non-negative, got {r}")
    if alpha <= 0.5 * r:
        raise DomainError(f"expansion requires alpha > r/2 (alpha={alpha}, r={r})")

    c = norm_cdf_inv(alpha)
    if r == 0.0:
        return OrderParameters(q0=1.0, Delta=0.0, epsilon=c, delta=0.0, zeta=c)

    q0 = 1.0 + 2.0 * math.pi * r * math.exp(c * c) * (1.0 - alpha)
    Delta = _SQRT_2PI * r * math.exp(0.5 * c * c)
    root = math.sqrt(q0)
    epsilon = root * norm_cdf_inv(alpha - 0.5 * r)
    return OrderParameters(q0=q0, Delta=Delta, epsilon=epsilon, delta=Delta / root, zeta=epsilon / root)


def half_alpha_line(r: float) -> OrderParameters:
    """Exact solution on alpha = 1/2, where epsilon = -Delta/2."""
    if not math.isfinite(r) or not 0.0 < r < 1.0:
        raise DomainError(f"half_alpha_line requires 0 < r < 1, got r={r}")

    delta = 2.0 * norm_cdf_inv(0.5 * (1.0 + r))
    inv_q0 = (
        delta / (_SQRT_2PI * r) * math.exp(-0.125 * delta * delta)
        + 0.25 * delta * delta
        - 0.5 * delta * delta / r
    )
    if inv_q0 <= 0.0:
        raise DomainError(f"r={r} lies beyond the alpha=1/2 boundary point")

    q0 = 1.0 / inv_q0
    Delta = delta * math.sqrt(q0)
    return OrderParameters(q0=q0, Delta=Delta, epsilon=-0.5 * Delta, delta=delta, zeta=-0.5 * delta)


def epsilon_zero_alpha(r: float) -> float:
    """Confidence level at which the VaR proxy epsilon vanishes for a given r."""
    _check_open_half(r, "epsilon_zero_alpha")
    c = norm_cdf_inv(0.5 + r)
    return 0.5 + r + math.expm1(-0.5 * c * c) / (_SQRT_2PI * c)


def minimax_solution(r: float) -> MinimaxSolution:
    _check_open_half(r, "minimax_solution")
    rho = -norm_cdf_inv(r)
    gap = norm_pdf(rho) - r * rho
    return MinimaxSolution(
        rho=rho,
        scaled_Delta=math.sqrt(r / rho * gap),
        sqrt_q0=math.sqrt(r / (rho * gap)),
        epsilon=math.sqrt(r * rho / gap),
    )


def minimax_critical_asymptotics(r: float) -> tuple[float, float, float]:
    """Leading behaviour of the minimax solution as r approaches 1/2.

    Returns ((1 - alpha) * Delta, sqrt(q0), epsilon).
    """
    _check_open_half(r, "minimax_critical_asymptotics")
    gap = math.sqrt(0.5 - r)
    return (
        1.0 / (2.0 * math.sqrt(math.pi) * gap),
        1.0 / (math.sqrt(2.0) * gap),
        math.sqrt(math.pi) * gap,
    )
