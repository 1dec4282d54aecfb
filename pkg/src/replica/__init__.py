from replica.analytic_lines import (
    epsilon_zero_alpha,
    half_alpha_line,
    minimax_critical_asymptotics,
    minimax_solution,
    small_r_expansion,
)
from replica.core import (
    alpha_slice,
    hat_params,
    in_sample_gap,
    mirror_ratios,
    phase_boundary,
    residuals,
    risk_report,
    solve_order_params,
    solve_ratios,
    weight_density,
)
from replica.models import (
    ControlPoint,
    HatParameters,
    MinimaxSolution,
    OrderParameters,
    RatioSolution,
    RiskReport,
)

__all__ = [
    "ControlPoint",
    "HatParameters",
    "MinimaxSolution",
    "OrderParameters",
    "RatioSolution",
    "RiskReport",
    "alpha_slice",
    "epsilon_zero_alpha",
    "half_alpha_line",
    "hat_params",
    "in_sample_gap",
    "minimax_critical_asymptotics",
    "minimax_solution",
    "mirror_ratios",
    "phase_boundary",
    "residuals",
    "risk_report",
    "small_r_expansion",
    "solve_order_params",
    "solve_ratios",
    "weight_density",
]
