from parametric.estimates import (
    contour_r_param,
    phi_factor,
    q0_param,
    q0_param_phi_form,
    r_crit_param,
    required_horizon,
    round_half_away,
)

__all__ = [
    "contour_r_param",
    "phi_factor",
    "q0_param",
    "q0_param_phi_form",
    "r_crit_param",
    "required_horizon",
    "round_half_away",
]
