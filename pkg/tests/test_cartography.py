from __future__ import annotations

import math

import numpy as np
import pytest

from cartography import (
    AspectTable,
    compare_estimators,
    evaluate_cell,
    evaluate_grid,
    historical_contour_r,
    metric_value,
    parametric_contour_r,
    parse_grid,
    phase_boundary_curve,
    required_aspect_table,
    trace_contour,
)
from cartography.contours import _roots_along_r, _scan_grid
from errors import DomainError, EmptyContour, NoConvergence
from parametric import r_crit_param, round_half_away
from replica import epsilon_zero_alpha, minimax_solution, phase_boundary

TABLE_ALPHAS = [0.7, 0.8, 0.9, 0.91, 0.92, 0.93, 0.94, 0.95, 0.96, 0.97, 0.975, 0.98]

# Printed sample-length requirements T/N for the historical estimate.
HISTORICAL_TN = {
    0.05: [26, 27, 33, 35, 37, 39, 43, 47, 53, 64, 72, 83],
    0.10: [14, 14, 17, 18, 19, 20, 21, 24, 27, 31, 35, 40],
    0.15: [10, 10, 12, 12, 13, 13, 14, 16, 18, 20, 22, 25],
    0.20: [8, 8, 9, 9, 10, 10, 11, 12, 13, 15, 16, 17],
    0.25: [6, 6, 7, 8, 8, 8, 9, 9, 10, 11, 12, 12],
    0.50: [4, 4, 4, 4, 4, 4, 5, 5, 5, 5, 5, 5],
}


def test_parse_grid_ranges() -> None:
    assert parse_grid("0.5:0.6:0.05").tolist() == [0.5, 0.55, 0.6]
    grid = parse_grid("0.50:0.999:0.001")
    assert grid.size == 500
    assert 0.975 in grid.tolist()
    assert grid[-1] == 0.999


def test_parse_grid_lists_and_errors() -> None:
    assert parse_grid(" 0.1, 0.2,0.4 ").tolist() == [0.1, 0.2, 0.4]
    for bad in ("", "a,b", "1:0:0.1", "0:1:0", "0:1", "x:1:0.1"):
        with pytest.raises(DomainError):
            parse_grid(bad)


def test_metric_value_domain() -> None:
    with pytest.raises(DomainError):
        metric_value("sharpe", 0.9, 0.1)
    for r in (0.0, 1.0, -0.2, math.nan):
        with pytest.raises(DomainError):
            metric_value("est_error", 0.9, r)


def test_metric_value_at_alpha_one_uses_the_minimax_limit() -> None:
    mm = minimax_solution(0.3)
    assert metric_value("est_error", 1.0, 0.3) == pytest.approx(mm.sqrt_q0 - 1.0, rel=1e-10)
    assert metric_value("epsilon", 1.0, 0.3) == pytest.approx(mm.epsilon, rel=1e-10)
    with pytest.raises(DomainError):
        metric_value("Delta", 1.0, 0.3)


def test_evaluate_cell_reports_status() -> None:
    cell = evaluate_cell("est_error", 0.9, 0.2)
    assert cell["success"] and cell["status"] == "ok"
    assert cell["data"]["value"] > 0.0
    cell = evaluate_cell("est_error", 0.9, 0.7)
    assert not cell["success"]
    assert cell["status"] == "infeasible"
    assert cell["data"]["value"] is None


def test_grid_statuses() -> None:
    grid = evaluate_grid("est_error", [0.8, 0.9], [0.1, 0.2, 0.7, 1.0], workers=1)
    assert grid.values.shape == (2, 4)
    assert grid.status[0].tolist() == ["ok", "ok", "infeasible", "out_of_domain"]
    assert np.all(np.isfinite(grid.values[:, :2]))
    assert np.all(np.isnan(grid.values[:, 2:]))
    assert grid.status_counts() == {"ok": 4, "infeasible": 2, "out_of_domain": 2}
    # Larger r, larger error.
    assert np.all(grid.values[:, 1] > grid.values[:, 0])
    rows = grid.rows()
    assert len(rows) == 8
    assert rows[3] == {"alpha": 0.8, "r": 1.0, "value": None, "status": "out_of_domain"}


def test_ratio_metrics_extend_past_the_boundary() -> None:
    grid = evaluate_grid("delta", [0.9], [0.2, 0.7, 0.75], workers=1)
    assert grid.status.tolist() == [["ok", "ok", "ok"]]
    assert np.all(grid.values > 0.0)


def test_grid_rejects_bad_axes() -> None:
    with pytest.raises(DomainError):
        evaluate_grid("est_error", [0.9, 0.8], [0.1], workers=1)
    with pytest.raises(DomainError):
        evaluate_grid("est_error", [], [0.1], workers=1)
    with pytest.raises(DomainError):
        evaluate_grid("nope", [0.9], [0.1], workers=1)


def test_epsilon_zero_contour_matches_the_closed_form() -> None:
    line = trace_contour("epsilon", 0.0, [0.55, 0.6], scan_points=60)
    for alpha in (0.55, 0.6):
        r = line.r_at(alpha)
        assert r is not None
        assert epsilon_zero_alpha(r) == pytest.approx(alpha, abs=1e-6)


def test_a_failing_bracket_keeps_the_other_roots() -> None:
    nodes = set(_scan_grid(0.01, 0.9, 40).tolist())

    def gap(r: float) -> float:
        if r > 0.4 and r not in nodes:
            raise NoConvergence(f"solver failed at r={r}")
        return (r - 0.2) * (r - 0.6)

    roots = _roots_along_r(gap, 0.01, 0.9, 40)
    assert roots == [pytest.approx(0.2, abs=1e-12)]


def test_unreachable_level_gives_an_empty_contour() -> None:
    with pytest.raises(EmptyContour):
        trace_contour("q0", 1.0, [0.8, 0.9], scan_points=40)
    with pytest.raises(DomainError):
        trace_contour("q0", math.inf, [0.9])


def test_error_contour_at_the_regulatory_level() -> None:
    line = trace_contour("est_error", 0.05, [0.975], scan_points=60)
    assert line.branch_counts == {0.975: 1}
    r = line.r_at(0.975)
    assert r == pytest.approx(historical_contour_r(0.975, 0.05), rel=1e-6)
    assert abs(round_half_away(1.0 / r) - 72) <= 1
    rows = line.rows()
    assert rows[0]["metric"] == "est_error" and rows[0]["branch"] == 0


def test_error_contours_are_nested() -> None:
    alphas = [0.7, 0.9, 0.97]
    tight = trace_contour("est_error", 0.05, alphas, scan_points=40)
    loose = trace_contour("est_error", 0.10, alphas, scan_points=40)
    assert np.all(tight.rs < loose.rs)
    assert np.all(loose.rs < np.array([phase_boundary(a) for a in alphas]))


def test_parametric_contour_uses_the_closed_form() -> None:
    line = trace_contour("param_error", 0.1, [0.9, 0.975])
    assert line.r_at(0.975) == pytest.approx(parametric_contour_r(0.975, 0.1), rel=1e-12)


def test_boundary_curves() -> None:
    alphas = [0.7, 0.8, 0.9, 0.975, 0.999]
    historical = phase_boundary_curve("historical", alphas)
    parametric = phase_boundary_curve("parametric", alphas)
    assert historical.level == math.inf
    assert parametric.rs.tolist() == [r_crit_param(a) for a in alphas]
    assert np.all(parametric.rs > historical.rs)
    assert np.all(historical.rs <= 0.5 + 1e-9)
    with pytest.raises(DomainError):
        phase_boundary_curve("bootstrap", alphas)


@pytest.mark.parametrize("error", sorted(HISTORICAL_TN))
def test_historical_sample_length_table(error: float) -> None:
    table = required_aspect_table("historical", [error], TABLE_ALPHAS)
    assert table.status == [["ok"] * len(TABLE_ALPHAS)]
    for alpha, printed in zip(TABLE_ALPHAS, HISTORICAL_TN[error]):
        computed = table.entry(error, alpha)
        assert abs(computed - printed) <= 1, (error, alpha, computed, printed)


def test_parametric_table_layout() -> None:
    table = required_aspect_table("parametric", [0.05, 0.1], [0.9, 0.975])
    assert isinstance(table, AspectTable)
    assert table.columns == ["error", "0.9", "0.975"]
    rows = table.rows()
    assert rows[0]["error"] == "5%"
    assert rows[1]["0.975"] == 7
    assert set(table.to_dict()) == {"estimator", "error_levels", "alphas", "entries", "raw", "status"}


def test_table_arguments() -> None:
    with pytest.raises(DomainError):
        required_aspect_table("bootstrap")
    with pytest.raises(DomainError):
        required_aspect_table("parametric", [0.0])


def test_historical_estimate_needs_more_data() -> None:
    result = compare_estimators(0.975, 0.05)
    assert abs(result["historical_tn"] - 72) <= 1
    assert abs(result["parametric_tn"] - 13) <= 1
    assert result["sample_ratio"] == pytest.approx(result["parametric_r"] / result["historical_r"])
    assert result["sample_ratio"] > 4.0
