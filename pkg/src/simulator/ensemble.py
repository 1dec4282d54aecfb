"""Monte Carlo ensembles of ES-optimised portfolios."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from config import Config
from errors import AllInfeasible, DomainError
from logger.app_logger import logger
from simulator.lp import UNBOUNDED, solve_es_lp, sample_metrics
from simulator.sampling import SampleSpec, generate_returns

SAMPLE_COLUMNS = ["index", "status", "q0_hat", "est_error_hat", "epsilon_hat", "es_in_ratio"]
SUMMARY_METRICS = ("q0_hat", "est_error_hat", "epsilon_hat", "epsilon_scaled", "es_in_ratio")

_LOG = {"component": "ensemble"}


@dataclass
class EnsembleStats:
    n_samples: int
    n_feasible: int
    feasible_fraction: float
    metrics: dict[str, np.ndarray]
    summary: dict[str, dict[str, float]]
    histogram: dict[str, list[float]]
    rows: list[dict[str, Any]] = field(repr=False, default_factory=list)

    def mean(self, metric: str) -> float:
        return self.summary[metric]["mean"]

    def stderr(self, metric: str) -> float:
        return self.summary[metric]["stderr"]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_samples": self.n_samples,
            "n_feasible": self.n_feasible,
            "feasible_fraction": self.feasible_fraction,
            "summary": self.summary,
            "histogram": self.histogram,
        }


def balanced_signs(n_assets: int) -> np.ndarray:
    """+1 on the first half of the assets, -1 on the second, 0 on a middle odd one."""
    signs = np.zeros(n_assets)
    half = n_assets // 2
    signs[:half] = 1.0
    signs[n_assets - half :] = -1.0
    return signs


def _run_sample(spec: SampleSpec, alpha: float, index: int, method: Optional[str]) -> dict[str, Any]:
    x = generate_returns(spec, index)
    sol = solve_es_lp(x, alpha, method)
    if not sol.optimal:
        return {"index": index, "status": UNBOUNDED}
    row = sample_metrics(sol, spec, alpha)
    row.pop("weight_histogram")
    row["index"] = index
    row["status"] = sol.status
    return row


def _shift_slope(
    spec: SampleSpec, alpha: float, index: int, xi: float, method: Optional[str]
) -> Optional[float]:
    """Central difference of (1/N) sum_i s_i w_i under x_it -> x_it + xi s_i."""
    x = generate_returns(spec, index)
    signs = balanced_signs(spec.n_assets)
    tilt = signs[:, None]
    plus = solve_es_lp(x + xi * tilt, alpha, method)
    minus = solve_es_lp(x - xi * tilt, alpha, method)
    if not (plus.optimal and minus.optimal):
        return None
    return float(signs @ (plus.weights - minus.weights)) / (2.0 * xi * spec.n_assets)


def _run_chunk(
    task: str,
    spec: SampleSpec,
    alpha: float,
    indices: Sequence[int],
    method: Optional[str],
    xi: float,
) -> list[Any]:
    if task == "shift":
        return [(i, _shift_slope(spec, alpha, i, xi, method)) for i in indices]
    return [_run_sample(spec, alpha, i, method) for i in indices]


def _map_samples(
    task: str,
    spec: SampleSpec,
    alpha: float,
    n_samples: int,
    method: Optional[str],
    workers: Optional[int],
    xi: float = 0.0,
) -> list[Any]:
    """Evaluate samples 0..n-1, in parallel when worthwhile, in index order."""
    workers = Config.WORKERS if workers is None else workers
    indices = list(range(n_samples))
    if workers <= 1 or n_samples < 2 * workers:
        return _run_chunk(task, spec, alpha, indices, method, xi)

    chunk_size = max(1, math.ceil(n_samples / (4 * workers)))
    chunks = [indices[i : i + chunk_size] for i in range(0, n_samples, chunk_size)]
    try:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(_run_chunk, task, spec, alpha, chunk, method, xi) for chunk in chunks
            ]
            results: list[Any] = []
            # Collected in submission order, which is sample-index order.
            for future in futures:
                results.extend(future.result())
            return results
    except (OSError, RuntimeError) as exc:
        logger.warning(
            "Parallel execution failed (%s); falling back to sequential",
            exc,
            extra=_LOG,
        )
        return _run_chunk(task, spec, alpha, indices, method, xi)


def _describe(values: np.ndarray) -> dict[str, float]:
    n = values.size
    std = float(np.std(values, ddof=1)) if n > 1 else 0.0
    return {
        "mean": float(np.mean(values)),
        "std": std,
        "stderr": std / math.sqrt(n) if n else math.nan,
    }


def run_ensemble(
    spec: SampleSpec,
    alpha: float,
    n_samples: int,
    method: Optional[str] = None,
    workers: Optional[int] = None,
) -> EnsembleStats:
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")

    logger.info(
        "Ensemble start: N=%s T=%s alpha=%s samples=%s dist=%s",
        spec.n_assets,
        spec.horizon,
        alpha,
        n_samples,
        spec.label(),
        extra=_LOG,
    )
    rows = _map_samples("sample", spec, alpha, n_samples, method, workers)
    feasible = [row for row in rows if row["status"] != UNBOUNDED]
    if not feasible:
        raise AllInfeasible(
            f"all {n_samples} samples unbounded at N={spec.n_assets}, T={spec.horizon}, alpha={alpha}"
        )

    metrics = {name: np.array([row[name] for row in feasible], dtype=float) for name in SUMMARY_METRICS}
    summary = {name: _describe(values) for name, values in metrics.items()}
    counts, edges = np.histogram(metrics["est_error_hat"], bins=min(30, len(feasible)))
    stats = EnsembleStats(
        n_samples=n_samples,
        n_feasible=len(feasible),
        feasible_fraction=len(feasible) / n_samples,
        metrics=metrics,
        summary=summary,
        histogram={"edges": edges.tolist(), "counts": counts.tolist()},
        rows=rows,
    )
    logger.info(
        "Ensemble done: feasible=%s/%s mean est_error=%.6g",
        stats.n_feasible,
        n_samples,
        stats.mean("est_error_hat"),
        extra=_LOG,
    )
    return stats


def feasibility_probability(
    spec: SampleSpec,
    alpha: float,
    n_samples: int,
    method: Optional[str] = None,
    workers: Optional[int] = None,
) -> float:
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    rows = _map_samples("sample", spec, alpha, n_samples, method, workers)
    return sum(row["status"] != UNBOUNDED for row in rows) / n_samples


def susceptibility_samples(
    spec: SampleSpec,
    alpha: float,
    xi: float,
    n_samples: int,
    method: Optional[str] = None,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Per-sample estimates of Delta from a balanced shift of the returns.

    A uniform shift of all returns is absorbed by eps under the budget
    constraint, so the returns are tilted by +xi on one half of the assets
    and -xi on the other. The weight response, rescaled by sqrt(N) and the
    tail count (1 - alpha) T, estimates Delta in the normalisation of the
    replica order parameters.
    """
    if not xi > 0.0:
        raise DomainError("xi must be positive")
    if spec.n_assets < 2:
        raise DomainError("a balanced shift needs at least two assets")

    results = _map_samples("shift", spec, alpha, n_samples, method, workers, xi)
    slopes = np.array([slope for _, slope in results if slope is not None], dtype=float)
    if slopes.size == 0:
        raise AllInfeasible(f"no sample feasible at both shifts (N={spec.n_assets}, T={spec.horizon})")
    tail_count = max((1.0 - alpha) * spec.horizon, 1.0)
    return slopes * math.sqrt(spec.n_assets) / tail_count


def susceptibility_summary(
    spec: SampleSpec,
    alpha: float,
    xi: float = Config.DEFAULT_SHIFT,
    n_samples: int = Config.DEFAULT_SAMPLES,
    method: Optional[str] = None,
    workers: Optional[int] = None,
    stats: Optional[EnsembleStats] = None,
) -> dict[str, Any]:
    """Ensemble mean of the Delta estimates and chi = Delta / sqrt(q0), with standard errors.

    ``stats`` is the unshifted ensemble of the same spec when the caller
    already has it; q0 is taken from its mean q0_hat.
    """
    deltas = susceptibility_samples(spec, alpha, xi, n_samples, method, workers)
    if stats is None:
        stats = run_ensemble(spec, alpha, n_samples, method, workers)
    spread = _describe(deltas)
    root_q0 = math.sqrt(stats.mean("q0_hat"))
    return {
        "xi": xi,
        "n_used": int(deltas.size),
        "Delta_hat": spread["mean"],
        "Delta_hat_stderr": spread["stderr"],
        "chi_hat": spread["mean"] / root_q0,
        "chi_hat_stderr": spread["stderr"] / root_q0,
    }


def susceptibility_fd(
    spec: SampleSpec,
    alpha: float,
    xi: float = Config.DEFAULT_SHIFT,
    n_samples: int = Config.DEFAULT_SAMPLES,
    method: Optional[str] = None,
    workers: Optional[int] = None,
) -> float:
    """Ensemble estimate of chi = Delta / sqrt(q0)."""
    return susceptibility_summary(spec, alpha, xi, n_samples, method, workers)["chi_hat"]


def locate_error_contour(
    template: SampleSpec,
    alpha: float,
    level: float,
    n_samples: int,
    method: Optional[str] = None,
    workers: Optional[int] = None,
    rel_tol: float = 0.01,
) -> dict[str, Any]:
    """Bisection in T at fixed N for the mean of sqrt(q0_hat) - 1 to hit ``level``.

    Horizons where fewer than half of the samples are feasible count as
    above the level.
    """
    if level <= 0.0:
        raise DomainError("level must be positive")
    n_assets = template.n_assets
    evaluations: list[dict[str, Any]] = []
    seen: dict[int, float] = {}

    def mean_error(horizon: int) -> float:
        if horizon in seen:
            return seen[horizon]
        try:
            stats = run_ensemble(template.with_horizon(horizon), alpha, n_samples, method, workers)
        except AllInfeasible:
            value = math.inf
        else:
            value = stats.mean("est_error_hat") if stats.feasible_fraction >= 0.5 else math.inf
        evaluations.append({"horizon": horizon, "r": n_assets / horizon, "mean_error": value})
        seen[horizon] = value
        return value

    short = max(2, math.ceil(2 * n_assets))
    long_ = 2 * short
    while mean_error(long_) > level:
        short, long_ = long_, 2 * long_
        if long_ > 10**7:
            raise DomainError(f"level {level} not reached for N={n_assets} below T=1e7")
    while mean_error(short) <= level and short > 1:
        long_, short = short, max(1, short // 2)

    while long_ - short > max(1, int(rel_tol * short)):
        mid = (short + long_) // 2
        if mean_error(mid) > level:
            short = mid
        else:
            long_ = mid

    horizon = long_
    return {
        "alpha": alpha,
        "level": level,
        "n_assets": n_assets,
        "horizon": horizon,
        "r": n_assets / horizon,
        "bracket": [short, long_],
        "evaluations": evaluations,
    }
