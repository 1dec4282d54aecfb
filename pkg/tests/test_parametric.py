from __future__ import annotations

import math

import numpy as np
import pytest

from errors import DomainError, InfeasibleRegion
from parametric import (
    contour_r_param,
    phi_factor,
    q0_param,
    q0_param_phi_form,
    r_crit_param,
    required_horizon,
    round_half_away,
)

TABLE_ALPHAS = [0.7, 0.8, 0.9, 0.91, 0.92, 0.93, 0.94, 0.95, 0.96, 0.97, 0.975, 0.98]

# Printed sample-length requirements T/N for the parametric estimate.
PARAMETRIC_TN = {
    0.05: [19, 16, 14, 14, 14, 14, 13, 13, 13, 13, 13, 13],
    0.10: [10, 9, 8, 8, 7, 7, 7, 7, 7, 7, 7, 7],
    0.15: [7, 6, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5],
    0.20: [6, 5, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4],
    0.25: [5, 4, 4, 4, 4, 4, 3, 3, 3, 3, 3, 3],
    0.50: [3, 3, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2],
}


def test_round_half_away() -> None:
    assert round_half_away(2.5) == 3
    assert round_half_away(-2.5) == -3
    assert round_half_away(2.49) == 2
    assert round_half_away(0.0) == 0


def test_phi_factor_values() -> None:
    assert phi_factor(0.5) == pytest.approx(0.7978845608028654, abs=1e-14)
    assert phi_factor(0.975) == pytest.approx(2.3378, abs=1e-4)


def test_phi_factor_increasing() -> None:
    values = [phi_factor(a) for a in np.linspace(0.5, 0.999, 200)]
    assert np.all(np.diff(values) > 0.0)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5, 1.2])
def test_phi_factor_rejects_endpoints(alpha: float) -> None:
    with pytest.raises(DomainError):
        phi_factor(alpha)


def test_r_crit_values_and_limits() -> None:
    assert r_crit_param(0.975) == pytest.approx(0.845, abs=1e-3)
    for alpha in (0.01, 0.5, 0.9, 0.999999):
        assert 0.0 < r_crit_param(alpha) < 1.0
    assert r_crit_param(1.0 - 1e-12) > 0.97
    assert r_crit_param(0.999) > r_crit_param(0.99) > r_crit_param(0.9)


def test_q0_param_values() -> None:
    assert q0_param(0.9, 0.0) == 1.0
    rc = r_crit_param(0.9)
    assert q0_param(0.9, 0.5 * rc) == pytest.approx(2.0, rel=1e-14)
    assert math.sqrt(q0_param(0.975, 100.0 / 682.0)) == pytest.approx(1.10, abs=1e-3)


def test_q0_forms_agree() -> None:
    for alpha in (0.6, 0.8, 0.95, 0.99):
        for frac in (0.1, 0.5, 0.9):
            r = frac * r_crit_param(alpha)
            assert q0_param(alpha, r) == pytest.approx(q0_param_phi_form(alpha, r), rel=1e-12)


def test_q0_param_beyond_boundary() -> None:
    rc = r_crit_param(0.9)
    with pytest.raises(InfeasibleRegion) as info:
        q0_param(0.9, rc)
    assert info.value.boundary == pytest.approx(rc)
    with pytest.raises(DomainError):
        q0_param(0.9, -0.1)


def test_q0_param_diverges_at_boundary() -> None:
    rc = r_crit_param(0.95)
    assert q0_param(0.95, rc * (1.0 - 1e-9)) > 1e8


def test_contour_inversion() -> None:
    assert contour_r_param(0.9, 1.0) == 0.0
    r = contour_r_param(0.975, 1.21)
    assert r == pytest.approx(0.1467, abs=2e-4)
    assert round_half_away(100.0 / r) == 682
    for q0 in (1.05, 1.21, 2.0, 10.0):
        assert q0_param(0.93, contour_r_param(0.93, q0)) == pytest.approx(q0, rel=1e-12)
    with pytest.raises(DomainError):
        contour_r_param(0.9, 0.99)


def test_contours_are_scaled_copies_of_the_critical_line() -> None:
    ratios = [contour_r_param(a, 1.44) / r_crit_param(a) for a in (0.6, 0.8, 0.95, 0.999)]
    assert max(ratios) - min(ratios) <= 1e-14


def test_required_horizon_worked_examples() -> None:
    assert required_horizon(0.975, 0.10, 100) == 682
    assert required_horizon(0.975, 0.05, 100) == 1272
    with pytest.raises(DomainError):
        required_horizon(0.975, 0.0, 100)
    with pytest.raises(DomainError):
        required_horizon(0.975, 0.1, 0)


@pytest.mark.parametrize("error", sorted(PARAMETRIC_TN))
def test_parametric_sample_length_table(error: float) -> None:
    for alpha, printed in zip(TABLE_ALPHAS, PARAMETRIC_TN[error]):
        computed = round_half_away(1.0 / contour_r_param(alpha, (1.0 + error) ** 2))
        assert abs(computed - printed) <= 1, (error, alpha, computed, printed)
