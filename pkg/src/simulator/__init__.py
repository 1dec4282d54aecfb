from simulator.ensemble import (
    SAMPLE_COLUMNS,
    EnsembleStats,
    balanced_signs,
    feasibility_probability,
    locate_error_contour,
    run_ensemble,
    susceptibility_fd,
    susceptibility_samples,
    susceptibility_summary,
)
from simulator.lp import (
    LP_METHODS,
    OPTIMAL,
    UNBOUNDED,
    LPSolution,
    empirical_var,
    epsilon_interval,
    sample_metrics,
    solve_es_lp,
)
from simulator.sampling import DISTRIBUTIONS, SampleMatrix, SampleSpec, generate_returns, sample_rng

__all__ = [
    "DISTRIBUTIONS",
    "LP_METHODS",
    "OPTIMAL",
    "SAMPLE_COLUMNS",
    "UNBOUNDED",
    "EnsembleStats",
    "LPSolution",
    "SampleMatrix",
    "SampleSpec",
    "balanced_signs",
    "empirical_var",
    "epsilon_interval",
    "feasibility_probability",
    "generate_returns",
    "locate_error_contour",
    "run_ensemble",
    "sample_metrics",
    "sample_rng",
    "solve_es_lp",
    "susceptibility_fd",
    "susceptibility_samples",
    "susceptibility_summary",
]
