"""Expected Shortfall minimisation as a linear program.

For a panel x (N assets by T periods) and confidence level alpha the
program is

    minimise   (1 - alpha) T eps + sum_t u_t
    subject to u_t >= 0,  u_t + eps + sum_i x_it w_i >= 0,  sum_i w_i = N

with w and eps free. Its optimum E gives the in-sample ES as
E / ((1 - alpha) T), and the optimal eps is the in-sample VaR of the
optimised portfolio. When (1 - alpha) T <= 1 the slacks are never worth
paying for and the program reduces to the minimax (maximal loss) problem

    minimise eps  subject to  eps + sum_i x_it w_i >= 0,  sum_i w_i = N

reported with objective (1 - alpha) T eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from config import Config
from errors import DomainError, NumericalError
from parametric import phi_factor
from simulator.sampling import SampleMatrix, SampleSpec

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"

LP_METHODS = ("highs", "bland")

_PIVOT_TOL = 1e-9


@dataclass
class LPSolution:
    status: str
    alpha: float
    method: str
    weights: Optional[np.ndarray] = None
    epsilon_hat: Optional[float] = None
    slacks: Optional[np.ndarray] = None
    objective: Optional[float] = None
    degenerate: bool = False
    minimax: bool = False
    iterations: int = 0
    reduced_costs: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def empirical_var(losses: np.ndarray, alpha: float) -> float:
    """Lower alpha-quantile of a loss sample: min{l : F(l) >= alpha}."""
    ordered = np.sort(np.asarray(losses, dtype=float))
    rank = math.ceil(alpha * ordered.size - 1e-9)
    return float(ordered[min(max(rank, 1), ordered.size) - 1])


def epsilon_interval(losses: np.ndarray, alpha: float) -> tuple[float, float]:
    """Interval of optimal eps for fixed weights.

    The objective in eps is convex piecewise linear with slope
    (1 - alpha) T - #{t : loss_t > eps}. It is flat between two order
    statistics exactly when (1 - alpha) T is an integer.
    """
    desc = np.sort(np.asarray(losses, dtype=float))[::-1]
    k = (1.0 - alpha) * desc.size
    nearest = round(k)
    if abs(k - nearest) <= 1e-9 and 1 <= nearest < desc.size:
        return float(desc[nearest]), float(desc[nearest - 1])
    j = min(max(math.ceil(k), 1), desc.size)
    return float(desc[j - 1]), float(desc[j - 1])


def _bland_simplex(
    c: np.ndarray, a_eq: np.ndarray, b_eq: np.ndarray, max_iter: int
) -> dict[str, Any]:
    """Two-phase dense tableau simplex with Bland's anti-cycling rule.

    Solves min c.z subject to a_eq z = b_eq, z >= 0. Returns a scipy-style
    result dict; status 0 optimal, 1 iteration limit, 2 infeasible,
    3 unbounded.
    """
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -a.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    nit = 0

    def pivot(row: int, col: int) -> None:
        nonlocal tab
        tab[row] /= tab[row, col]
        factors = tab[:, col].copy()
        factors[row] = 0.0
        tab -= np.outer(factors, tab[row])
        basis[row] = col

    def run(allowed: int) -> int:
        nonlocal nit
        while True:
            entering = next((j for j in range(allowed) if tab[m, j] < -_PIVOT_TOL), None)
            if entering is None:
                return 0
            if nit >= max_iter:
                return 1
            col = tab[:m, entering]
            rows = np.flatnonzero(col > _PIVOT_TOL)
            if rows.size == 0:
                return 3
            ratios = tab[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + _PIVOT_TOL * max(1.0, abs(best))]
            leaving = min(ties, key=lambda i: basis[i])
            pivot(int(leaving), entering)
            nit += 1

    # Artificial columns never re-enter.
    status = run(n)
    if status == 1:
        return {"x": None, "fun": None, "status": 1, "nit": nit, "success": False}
    if -tab[m, -1] > 1e-7 * max(1.0, b.sum()):
        return {"x": None, "fun": None, "status": 2, "nit": nit, "success": False}

    # Drive remaining artificials out of the basis where possible.
    for row in range(m):
        if basis[row] >= n:
            candidates = np.flatnonzero(np.abs(tab[row, :n]) > _PIVOT_TOL)
            if candidates.size:
                pivot(row, int(candidates[0]))

    tab[m, :] = 0.0
    tab[m, :n] = c
    for row in range(m):
        cb = c[basis[row]] if basis[row] < n else 0.0
        if cb != 0.0:
            tab[m] -= cb * tab[row]

    status = run(n)
    x = np.zeros(n + m)
    for row, var in enumerate(basis):
        x[var] = tab[row, -1]
    return {
        "x": x[:n],
        "fun": float(c @ x[:n]),
        "status": status,
        "nit": nit,
        "success": status == 0,
        "reduced_costs": tab[m, :n].copy(),
    }


def _solve_bland(x: np.ndarray, alpha: float, minimax: bool) -> dict[str, Any]:
    n_assets, horizon = x.shape
    # Free w and eps are split into positive and negative parts; every
    # inequality row gets a surplus column s_t >= 0.
    #   x_t.(w+ - w-) + (eps+ - eps-) + u_t - s_t = 0
    #   sum(w+ - w-) = N
    n_u = 0 if minimax else horizon
    n_vars = 2 * n_assets + 2 + n_u + horizon
    a_eq = np.zeros((horizon + 1, n_vars))
    a_eq[:horizon, :n_assets] = x.T
    a_eq[:horizon, n_assets : 2 * n_assets] = -x.T
    a_eq[:horizon, 2 * n_assets] = 1.0
    a_eq[:horizon, 2 * n_assets + 1] = -1.0
    if n_u:
        a_eq[:horizon, 2 * n_assets + 2 : 2 * n_assets + 2 + n_u] = np.eye(horizon)
    a_eq[:horizon, 2 * n_assets + 2 + n_u :] = -np.eye(horizon)
    a_eq[horizon, :n_assets] = 1.0
    a_eq[horizon, n_assets : 2 * n_assets] = -1.0
    b_eq = np.zeros(horizon + 1)
    b_eq[horizon] = n_assets

    c = np.zeros(n_vars)
    c[2 * n_assets] = 1.0 if minimax else (1.0 - alpha) * horizon
    c[2 * n_assets + 1] = -c[2 * n_assets]
    if n_u:
        c[2 * n_assets + 2 : 2 * n_assets + 2 + n_u] = 1.0

    budget = 50 * (horizon + 1 + n_vars)
    res = _bland_simplex(c, a_eq, b_eq, budget)
    if res["status"] == 1:
        raise NumericalError(f"simplex exceeded {budget} pivots")
    if res["status"] == 3:
        return {"status": UNBOUNDED, "nit": res["nit"]}
    if res["status"] != 0:
        raise NumericalError(f"simplex ended with status {res['status']}")

    z = res["x"]
    weights = z[:n_assets] - z[n_assets : 2 * n_assets]
    eps = float(z[2 * n_assets] - z[2 * n_assets + 1])
    slacks = z[2 * n_assets + 2 : 2 * n_assets + 2 + n_u] if n_u else np.zeros(horizon)
    return {
        "status": OPTIMAL,
        "weights": weights,
        "epsilon": eps,
        "slacks": slacks,
        "nit": res["nit"],
        "reduced_costs": res["reduced_costs"],
    }


def _solve_highs(x: np.ndarray, alpha: float, minimax: bool) -> dict[str, Any]:
    n_assets, horizon = x.shape
    ones = np.ones((horizon, 1))
    if minimax:
        a_ub = sparse.hstack([sparse.csr_matrix(-x.T), sparse.csr_matrix(-ones)], format="csr")
        c = np.zeros(n_assets + 1)
        c[n_assets] = 1.0
        bounds = [(None, None)] * (n_assets + 1)
        a_eq = np.concatenate([np.ones(n_assets), [0.0]])[None, :]
    else:
        a_ub = sparse.hstack(
            [sparse.csr_matrix(-x.T), sparse.csr_matrix(-ones), -sparse.identity(horizon, format="csr")],
            format="csr",
        )
        c = np.concatenate([np.zeros(n_assets), [(1.0 - alpha) * horizon], np.ones(horizon)])
        bounds = [(None, None)] * (n_assets + 1) + [(0.0, None)] * horizon
        a_eq = np.concatenate([np.ones(n_assets), np.zeros(1 + horizon)])[None, :]

    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=np.zeros(horizon),
        A_eq=a_eq,
        b_eq=[float(n_assets)],
        bounds=bounds,
        method="highs-ds",
    )
    # The primal is always feasible (w = 1, eps large), so "infeasible" can
    # only be HiGHS reporting an unbounded or dual-infeasible problem.
    if res.status in (2, 3):
        return {"status": UNBOUNDED, "nit": int(getattr(res, "nit", 0))}
    if res.status != 0:
        raise NumericalError(f"HiGHS failed: {res.message}")

    weights = res.x[:n_assets]
    eps = float(res.x[n_assets])
    slacks = np.zeros(horizon) if minimax else res.x[n_assets + 1 :]
    return {"status": OPTIMAL, "weights": weights, "epsilon": eps, "slacks": slacks, "nit": int(res.nit)}


def solve_es_lp(x: SampleMatrix, alpha: float, method: Optional[str] = None) -> LPSolution:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or not np.all(np.isfinite(x)):
        raise DomainError("return panel must be a finite N x T matrix")
    if not math.isfinite(alpha) or not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    method = method or Config.LP_METHOD
    if method not in LP_METHODS:
        raise DomainError(f"unknown LP method {method!r}")

    horizon = x.shape[1]
    tail_count = (1.0 - alpha) * horizon
    minimax = tail_count <= 1.0
    solver = _solve_bland if method == "bland" else _solve_highs
    raw = solver(x, alpha, minimax)

    if raw["status"] == UNBOUNDED:
        return LPSolution(status=UNBOUNDED, alpha=alpha, method=method, minimax=minimax, iterations=raw["nit"])

    weights = raw["weights"]
    eps = raw["epsilon"]
    slacks = np.maximum(raw["slacks"], 0.0)
    if minimax:
        objective = tail_count * eps
    else:
        objective = tail_count * eps + float(slacks.sum())
    losses = -(weights @ x)
    lo, hi = epsilon_interval(losses, alpha)
    return LPSolution(
        status=OPTIMAL,
        alpha=alpha,
        method=method,
        weights=weights,
        epsilon_hat=eps,
        slacks=slacks,
        objective=objective,
        degenerate=hi - lo > 1e-12 * max(1.0, abs(hi)),
        minimax=minimax,
        iterations=raw["nit"],
        reduced_costs=raw.get("reduced_costs"),
    )


def sample_metrics(sol: LPSolution, spec: SampleSpec, alpha: float) -> dict[str, Any]:
    if not sol.optimal:
        raise DomainError("sample metrics need an optimal LP solution")

    n_assets = spec.n_assets
    w = sol.weights
    q0_hat = float(w @ w) / n_assets
    es_in = sol.objective / ((1.0 - alpha) * spec.horizon) if alpha < 1.0 else sol.epsilon_hat
    es_in_ratio = es_in / (phi_factor(alpha) * math.sqrt(n_assets)) if alpha < 1.0 else 0.0
    counts, edges = np.histogram(w, bins=20)
    return {
        "q0_hat": q0_hat,
        "est_error_hat": math.sqrt(q0_hat) - 1.0,
        "es_in": es_in,
        "es_in_ratio": es_in_ratio,
        "var_hat": sol.epsilon_hat,
        "epsilon_hat": sol.epsilon_hat,
        "epsilon_scaled": sol.epsilon_hat / math.sqrt(n_assets),
        "degenerate": sol.degenerate,
        "weight_histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
    }
