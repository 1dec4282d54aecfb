from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.stats import kstest

from errors import AllInfeasible, DomainError
from replica import ControlPoint, risk_report, solve_order_params
from simulator import (
    SAMPLE_COLUMNS,
    SampleSpec,
    balanced_signs,
    feasibility_probability,
    generate_returns,
    locate_error_contour,
    run_ensemble,
    solve_es_lp,
    susceptibility_fd,
    susceptibility_samples,
    susceptibility_summary,
)


def test_balanced_signs() -> None:
    assert balanced_signs(4).tolist() == [1.0, 1.0, -1.0, -1.0]
    assert balanced_signs(5).tolist() == [1.0, 1.0, 0.0, -1.0, -1.0]
    assert balanced_signs(7).sum() == 0.0


def test_run_ensemble_small() -> None:
    spec = SampleSpec(3, 30, master_seed=11)
    stats = run_ensemble(spec, 0.8, 12, workers=1)
    assert stats.n_samples == 12
    assert stats.n_feasible == 12
    assert stats.feasible_fraction == 1.0
    assert [row["index"] for row in stats.rows] == list(range(12))
    assert set(SAMPLE_COLUMNS) <= set(stats.rows[0])
    assert stats.metrics["q0_hat"].shape == (12,)
    # q0_hat >= 1 by Cauchy-Schwarz under the budget.
    assert np.all(stats.metrics["q0_hat"] >= 1.0 - 1e-9)
    assert stats.mean("est_error_hat") > 0.0
    assert sum(stats.histogram["counts"]) == 12
    assert set(stats.to_dict()) == {"n_samples", "n_feasible", "feasible_fraction", "summary", "histogram"}


def test_run_ensemble_is_deterministic() -> None:
    spec = SampleSpec(3, 30, master_seed=11)
    first = run_ensemble(spec, 0.8, 6, workers=1)
    second = run_ensemble(spec, 0.8, 6, workers=1)
    assert np.array_equal(first.metrics["q0_hat"], second.metrics["q0_hat"])
    assert first.summary == second.summary


def test_all_samples_unbounded() -> None:
    spec = SampleSpec(5, 2)
    with pytest.raises(AllInfeasible):
        run_ensemble(spec, 0.5, 4, workers=1)
    assert feasibility_probability(spec, 0.5, 4, workers=1) == 0.0


def test_feasibility_with_long_samples() -> None:
    assert feasibility_probability(SampleSpec(2, 40), 0.9, 5, workers=1) == 1.0


def test_invalid_ensemble_arguments() -> None:
    spec = SampleSpec(2, 10)
    with pytest.raises(DomainError):
        run_ensemble(spec, 0.9, 0)
    with pytest.raises(DomainError):
        feasibility_probability(spec, 0.9, 0)
    with pytest.raises(DomainError):
        susceptibility_samples(spec, 0.9, 0.0, 3)
    with pytest.raises(DomainError):
        susceptibility_samples(SampleSpec(1, 10), 0.9, 1e-3, 3)
    with pytest.raises(DomainError):
        locate_error_contour(spec, 0.9, 0.0, 3)


def test_tilted_returns_pull_weight_towards_the_favoured_half() -> None:
    deltas = susceptibility_samples(SampleSpec(4, 40, master_seed=2), 0.8, 1e-3, 8, workers=1)
    assert deltas.size == 8
    assert np.all(deltas >= -1e-6)
    assert deltas.mean() > 0.0


def test_susceptibility_summary_combines_the_shift_and_plain_ensembles() -> None:
    spec = SampleSpec(4, 60, master_seed=5)
    deltas = susceptibility_samples(spec, 0.8, 1e-2, 6, workers=1)
    stats = run_ensemble(spec, 0.8, 6, workers=1)
    summary = susceptibility_summary(spec, 0.8, 1e-2, 6, workers=1, stats=stats)
    root_q0 = math.sqrt(stats.mean("q0_hat"))
    assert summary["n_used"] == deltas.size == 6
    assert summary["Delta_hat"] == pytest.approx(deltas.mean(), rel=1e-12)
    assert summary["chi_hat"] == pytest.approx(deltas.mean() / root_q0, rel=1e-12)
    assert summary["chi_hat_stderr"] == pytest.approx(summary["Delta_hat_stderr"] / root_q0, rel=1e-12)
    assert susceptibility_fd(spec, 0.8, 1e-2, 6, workers=1) == pytest.approx(summary["chi_hat"], rel=1e-12)


def test_susceptibility_shrinks_with_longer_samples() -> None:
    short = susceptibility_fd(SampleSpec(4, 40, master_seed=9), 0.8, 5e-2, 16, workers=1)
    long_ = susceptibility_fd(SampleSpec(4, 4000, master_seed=9), 0.8, 5e-2, 16, workers=1)
    assert 0.0 <= long_ < 0.5 * short


def test_parallel_ensemble_matches_the_serial_one() -> None:
    spec = SampleSpec(3, 30, master_seed=21)
    serial = run_ensemble(spec, 0.8, 8, workers=1)
    parallel = run_ensemble(spec, 0.8, 8, workers=2)
    assert parallel.rows == serial.rows
    assert parallel.summary == serial.summary
    np.testing.assert_array_equal(
        susceptibility_samples(spec, 0.8, 1e-2, 8, workers=2),
        susceptibility_samples(spec, 0.8, 1e-2, 8, workers=1),
    )


@pytest.mark.slow
def test_susceptibility_tracks_the_replica_solution() -> None:
    alpha = 0.975
    spec = SampleSpec(50, 2500, master_seed=12)
    op = solve_order_params(ControlPoint(alpha, spec.r))
    summary = susceptibility_summary(spec, alpha, 5e-3, 300)
    assert summary["n_used"] == 300
    # N = 50 leaves a finite-size offset of a few percent on top of the sampling error.
    assert abs(summary["chi_hat"] - op.delta) <= 3.0 * summary["chi_hat_stderr"] + 0.05 * op.delta
    assert abs(summary["Delta_hat"] - op.Delta) <= 3.0 * summary["Delta_hat_stderr"] + 0.05 * op.Delta


@pytest.mark.slow
def test_ensemble_means_track_the_replica_solution() -> None:
    alpha = 0.975
    spec = SampleSpec(50, 2000, master_seed=4)
    report = risk_report(ControlPoint(alpha, spec.r))
    stats = run_ensemble(spec, alpha, 500)
    assert stats.feasible_fraction == 1.0
    for metric, expected in (
        ("est_error_hat", report.est_error),
        ("epsilon_scaled", report.var_proxy),
        ("es_in_ratio", report.es_in_ratio),
    ):
        assert abs(stats.mean(metric) - expected) <= 3.0 * stats.stderr(metric), metric


@pytest.mark.slow
def test_pooled_weights_follow_the_replica_distribution() -> None:
    alpha, spec = 0.9, SampleSpec(50, 500, master_seed=14)
    q0 = solve_order_params(ControlPoint(alpha, spec.r)).q0
    pooled = []
    for index in range(100):
        sol = solve_es_lp(generate_returns(spec, index), alpha)
        assert sol.optimal
        pooled.append(sol.weights)
    result = kstest(np.concatenate(pooled), "norm", args=(1.0, math.sqrt(q0 - 1.0)))
    assert result.pvalue > 0.01


@pytest.mark.slow
def test_feasibility_falls_with_the_aspect_ratio() -> None:
    probs = [
        feasibility_probability(SampleSpec(20, horizon, master_seed=6), 0.99, 200)
        for horizon in (80, 40, 27, 20, 16)
    ]
    assert probs[0] >= 0.95
    assert probs[-1] <= 0.05
    assert probs[0] > probs[1] > probs[2]
    assert all(a >= b for a, b in zip(probs, probs[1:]))


@pytest.mark.slow
def test_error_distribution_sharpens_with_size() -> None:
    widths = [
        run_ensemble(SampleSpec(n, 40 * n, master_seed=8), 0.975, samples).summary["est_error_hat"]["std"]
        for n, samples in ((25, 1000), (50, 1000), (100, 200))
    ]
    assert widths[0] > widths[1] > widths[2]


@pytest.mark.slow
def test_fat_tails_demand_longer_samples() -> None:
    def contour_r(dist: str) -> float:
        template = SampleSpec.from_cli(dist, 50, 1000, 21)
        return locate_error_contour(template, 0.975, 0.05, 500)["r"]

    gauss, heavy, moderate = contour_r("gaussian"), contour_r("student:3"), contour_r("student:10")
    assert 2.5 <= gauss / heavy <= 5.0
    assert heavy < moderate < gauss


@pytest.mark.slow
def test_located_contour_sits_near_the_replica_contour() -> None:
    found = locate_error_contour(SampleSpec(30, 30, master_seed=12), 0.9, 0.25, 60)
    lo, hi = found["bracket"]
    assert lo < hi
    assert found["horizon"] == hi
    assert found["r"] == pytest.approx(30 / hi)
    horizons = {e["horizon"] for e in found["evaluations"]}
    assert {lo, hi} <= horizons
    op = solve_order_params(ControlPoint(0.9, found["r"]))
    assert math.sqrt(op.q0) - 1.0 == pytest.approx(0.25, rel=0.3)
