"""Solve the reduced saddle-point equations for the order parameters.

The first two equations fix the ratios delta = Delta/sqrt(q0) and
zeta = epsilon/sqrt(q0). With a = zeta and b = zeta + delta they read

    Phi(b) - Phi(a) = r
    (Psi(b) - Psi(a)) / delta = alpha

The third equation is linear in 1/Delta^2 once the ratios are known, so
q0 follows in closed form:

    1/q0 = 2 (W(b) - W(a)) / r - 2 alpha zeta delta / r - 1 - delta^2 / r

q0 <= 0 from this expression means the point lies beyond the phase boundary.

The ratio equations are invariant under (alpha, a, b) -> (1 - alpha, -b, -a).
The solver always works in the frame with alpha <= 1/2 and keeps the upper
endpoint b of that frame as an unknown; near alpha = 1 the segment becomes
very long while b stays of order one.
"""

from __future__ import annotations

import math
from typing import Any, Iterable, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import brentq

from config import Config
from errors import AtlasError, DomainError, InfeasibleRegion, NoConvergence
from logger.app_logger import logger
from parametric import phi_factor
from replica.analytic_lines import minimax_solution
from replica.models import (
    ControlPoint,
    HatParameters,
    OrderParameters,
    RatioSolution,
    RiskReport,
)
from specfun import norm_cdf, norm_cdf_inv, norm_pdf, segment_integrals
from specfun.gaussian import ArrayOrFloat

_EPS = float(np.finfo(float).eps)
_NEWTON_TOL = 1e-14
_SMALL_R = 1e-3

_LOG = {"component": "replica"}


def _frame(alpha: float, delta: float, zeta: float) -> tuple[float, float, bool]:
    """Return (alpha', upper endpoint, mirrored) of the alpha <= 1/2 frame."""
    if alpha <= 0.5:
        return alpha, zeta + delta, False
    return 1.0 - alpha, -zeta, True


def mirror_ratios(alpha: float, delta: float, zeta: float) -> tuple[float, float, float]:
    """Map a ratio solution at alpha onto the equivalent one at 1 - alpha."""
    return 1.0 - alpha, delta, -zeta - delta


def _inverse_q0(alpha: float, r: float, delta: float, zeta: float) -> float:
    alpha_f, upper, mirrored = _frame(alpha, delta, zeta)
    _, _, dw = segment_integrals(upper - delta, delta, upper=upper)
    if mirrored:
        # W(b) - W(a) = delta*zeta + delta^2/2 + dw over the mirrored segment;
        # substituting cancels the large terms analytically.
        return 2.0 * (alpha_f * zeta * delta + dw) / r - 1.0
    return 2.0 * (dw - alpha * zeta * delta) / r - 1.0 - delta * delta / r


def residuals(p: ControlPoint, delta: float, zeta: float, Delta: float) -> tuple[float, float, float]:
    """Residuals of the three reduced equations.

    The third residual is the Delta equation multiplied by 2*delta^2, i.e.
    1/q0(delta, zeta) - (delta/Delta)^2, which keeps it of order one across
    the plane.
    """
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    if not Delta > 0.0:
        raise DomainError(f"Delta must be positive, got {Delta}")

    alpha_f, upper, mirrored = _frame(p.alpha, delta, zeta)
    dphi, dpsi, _ = segment_integrals(upper - delta, delta, upper=upper)
    r1 = dphi - p.r
    r2 = dpsi / delta - alpha_f
    if mirrored:
        r2 = -r2
    r3 = _inverse_q0(p.alpha, p.r, delta, zeta) - (delta / Delta) ** 2
    return r1, r2, r3


def _frame_residual(alpha_f: float, r: float, upper: float, delta: float) -> tuple[np.ndarray, float, float]:
    dphi, dpsi, _ = segment_integrals(upper - delta, delta, upper=upper)
    return np.array([dphi - r, dpsi / delta - alpha_f]), dphi, dpsi


def _scaled_norm(fx: np.ndarray, alpha_f: float, r: float) -> float:
    return max(abs(fx[0]) / r, abs(fx[1]) / max(alpha_f, _EPS))


def _ratio_tolerance(upper: float, delta: float) -> np.ndarray:
    """Acceptance band for the ratio residuals, widened by endpoint rounding."""
    lower = upper - delta
    spread = abs(upper) * norm_pdf(upper) + abs(lower) * norm_pdf(lower)
    return Config.RATIO_TOL * np.array([1.0 + spread, 1.0 + abs(upper)])


def _newton(alpha_f: float, r: float, upper: float, delta: float, max_iter: int) -> dict[str, Any]:
    """Damped Newton on (upper, delta) with the analytic Jacobian."""
    x = np.array([upper, delta], dtype=float)
    fx, dphi, dpsi = _frame_residual(alpha_f, r, x[0], x[1])
    norm = _scaled_norm(fx, alpha_f, r)
    nit = 0

    for nit in range(1, max_iter + 1):
        if norm <= _NEWTON_TOL:
            break

        b, d = x
        a = b - d
        mean = dpsi / d
        jac = np.array(
            [
                [norm_pdf(b) - norm_pdf(a), norm_pdf(a)],
                [dphi / d, (norm_cdf(a) - mean) / d],
            ]
        )
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            break

        t = 1.0
        accepted = False
        while t > 1e-6:
            trial = x + t * step
            if trial[1] > 0.0 and np.all(np.isfinite(trial)):
                f_trial, dphi_t, dpsi_t = _frame_residual(alpha_f, r, trial[0], trial[1])
                n_trial = _scaled_norm(f_trial, alpha_f, r)
                if n_trial < norm:
                    x, fx, dphi, dpsi, norm = trial, f_trial, dphi_t, dpsi_t, n_trial
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            break
        if np.all(np.abs(t * step) <= Config.STEP_TOL * (1.0 + np.abs(x))):
            break

    return {"x": x, "success": norm <= 1e3 * _NEWTON_TOL, "fun": fx, "norm": norm, "nit": nit}


def _bracket_solve(alpha_f: float, r: float) -> tuple[float, float]:
    """Brent search on the lower endpoint a, with b(a) = Phi^-1(Phi(a) + r)."""

    def upper_of(a: float) -> float:
        return norm_cdf_inv(norm_cdf(a) + r)

    def mean_gap(a: float) -> float:
        upper = upper_of(a)
        width = upper - a
        _, dpsi, _ = segment_integrals(a, width, upper=upper)
        return dpsi / width - alpha_f

    # The symmetric segment has mean Phi equal to 1/2 >= alpha'.
    a_hi = norm_cdf_inv(0.5 * (1.0 - r))
    step = max(1.0, -2.0 * a_hi)
    a_lo = a_hi - step
    while mean_gap(a_lo) >= 0.0:
        step *= 2.0
        if step > Config.DELTA_CEILING:
            raise NoConvergence(f"no bracket for the ratio system at alpha'={alpha_f}, r={r}")
        a_lo = a_hi - step

    a_root, info = brentq(
        mean_gap,
        a_lo,
        a_hi,
        xtol=1e-300,
        rtol=4.0 * _EPS,
        maxiter=Config.MAX_ITER,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NoConvergence(f"ratio bracket search did not converge at alpha'={alpha_f}, r={r}")

    logger.debug(
        "Ratio bracket [%.6g, %.6g] solved in %s iterations",
        a_lo,
        a_hi,
        info.iterations,
        extra=_LOG,
    )
    upper = upper_of(a_root)
    return upper, upper - a_root


def _solve_frame(alpha_f: float, r: float) -> tuple[float, float]:
    if alpha_f == 0.5:
        delta = 2.0 * norm_cdf_inv(0.5 * (1.0 + r))
        return 0.5 * delta, delta

    if r < _SMALL_R:
        c = norm_cdf_inv(alpha_f)
        delta0 = r / norm_pdf(c)
        guess = _newton(alpha_f, r, c + 0.5 * delta0, delta0, Config.MAX_ITER)
        if guess["success"]:
            return float(guess["x"][0]), float(guess["x"][1])
        logger.debug("Asymptotic start failed at r=%s, falling back to bracketing", r, extra=_LOG)

    upper, delta = _bracket_solve(alpha_f, r)
    polish = _newton(alpha_f, r, upper, delta, Config.MAX_ITER)
    if polish["norm"] <= _scaled_norm(_frame_residual(alpha_f, r, upper, delta)[0], alpha_f, r):
        upper, delta = float(polish["x"][0]), float(polish["x"][1])
    return upper, delta


def solve_ratios(p: ControlPoint) -> RatioSolution:
    """Solve the two ratio equations; defined on both sides of the phase boundary."""
    if p.alpha >= 1.0:
        raise DomainError("alpha = 1 has no finite ratios; use minimax_solution")
    if p.r >= 1.0:
        raise DomainError(f"ratio system has no solution for r >= 1 (r={p.r})")

    alpha_f = min(p.alpha, 1.0 - p.alpha)
    upper, delta = _solve_frame(alpha_f, p.r)
    zeta = -upper if p.alpha > 0.5 else upper - delta

    fx, _, _ = _frame_residual(alpha_f, p.r, upper, delta)
    if not (delta > 0.0 and np.all(np.abs(fx) <= _ratio_tolerance(upper, delta))):
        raise NoConvergence(
            f"ratio residuals {fx.tolist()} above tolerance at alpha={p.alpha}, r={p.r}"
        )
    return RatioSolution(delta=delta, zeta=zeta)


def _boundary_or_none(alpha: float) -> Optional[float]:
    try:
        return phase_boundary(alpha)
    except AtlasError:
        return None


def solve_order_params(p: ControlPoint, locate_boundary: bool = True) -> OrderParameters:
    """Full order-parameter triple at a feasible control point.

    With ``locate_boundary`` the InfeasibleRegion error carries r*(alpha);
    grid sweeps switch it off since the boundary costs a root search.
    """
    if p.alpha >= 1.0:
        raise DomainError("alpha = 1 is the minimax limit; use minimax_solution")
    if p.r >= 1.0:
        # r* < 1/2 for every alpha < 1.
        boundary = _boundary_or_none(p.alpha) if locate_boundary else None
        where = f"; r*({p.alpha})={boundary:.10g}" if boundary is not None else ""
        raise InfeasibleRegion(f"r={p.r} lies beyond the phase boundary{where}", boundary=boundary)

    delta, zeta = solve_ratios(p)
    inv_q0 = _inverse_q0(p.alpha, p.r, delta, zeta)
    if not math.isfinite(inv_q0) or inv_q0 * Config.DELTA_CEILING <= 1.0:
        boundary = _boundary_or_none(p.alpha) if locate_boundary else None
        where = f" r*({p.alpha})={boundary:.10g}" if boundary is not None else ""
        raise InfeasibleRegion(
            f"r={p.r} lies on or beyond the phase boundary{where}",
            boundary=boundary,
        )

    op = OrderParameters.from_ratios(delta, zeta, 1.0 / inv_q0)
    worst = max(abs(v) for v in residuals(p, op.delta, op.zeta, op.Delta))
    if worst > Config.RESIDUAL_TOL:
        raise NoConvergence(f"residual {worst:.3g} above tolerance at alpha={p.alpha}, r={p.r}")
    return op


def hat_params(op: OrderParameters) -> HatParameters:
    delta_hat = 1.0 / (2.0 * op.Delta)
    return HatParameters(
        lam=2.0 * delta_hat,
        Delta_hat=delta_hat,
        q0_hat=(1.0 - op.q0) * 2.0 * delta_hat * delta_hat,
    )


def _minimax_report(r: float) -> RiskReport:
    if r >= 0.5:
        raise InfeasibleRegion(f"r={r} lies on or beyond the minimax boundary r*=0.5", boundary=0.5)
    mm = minimax_solution(r)
    q0 = mm.sqrt_q0 ** 2
    return RiskReport(
        alpha=1.0,
        r=r,
        est_error=mm.sqrt_q0 - 1.0,
        susceptibility=math.inf,
        var_proxy=mm.epsilon,
        es_out_ratio=mm.sqrt_q0,
        # ES of the true distribution is unbounded at alpha = 1.
        es_in_ratio=0.0,
        weight_mean=1.0,
        weight_var=q0 - 1.0,
        scaled_Delta=mm.scaled_Delta,
        minimax=True,
    )


def risk_report(p: ControlPoint) -> RiskReport:
    if p.alpha == 1.0:
        return _minimax_report(p.r)

    op = solve_order_params(p)
    # (1 - alpha) * phi(alpha) is the density at Phi^-1(alpha).
    tail_density = (1.0 - p.alpha) * phi_factor(p.alpha)
    root = math.sqrt(op.q0)
    return RiskReport(
        alpha=p.alpha,
        r=p.r,
        est_error=root - 1.0,
        susceptibility=op.delta,
        var_proxy=op.epsilon,
        es_out_ratio=root,
        es_in_ratio=p.r / (op.Delta * tail_density),
        weight_mean=1.0,
        weight_var=op.q0 - 1.0,
        scaled_Delta=(1.0 - p.alpha) * op.Delta,
        order=op,
    )


def in_sample_gap(p: ControlPoint) -> float:
    """How far the out-of-sample ES ratio exceeds the in-sample one."""
    report = risk_report(p)
    return report.es_out_ratio - report.es_in_ratio


def phase_boundary(alpha: float) -> float:
    """Critical aspect ratio r*(alpha) where q0 diverges."""
    if not math.isfinite(alpha) or not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return 0.5

    def inverse_q0(r: float) -> float:
        delta, zeta = solve_ratios(ControlPoint(alpha, r))
        return _inverse_q0(alpha, r, delta, zeta)

    lo = 1e-12
    while inverse_q0(lo) <= 0.0:
        lo *= 1e-3
        if lo < 1e-200:
            raise NoConvergence(f"no feasible r found at alpha={alpha}")

    hi = 0.5
    while inverse_q0(hi) > 0.0:
        hi = 0.5 * (1.0 + hi)
        if hi > 1.0 - 1e-9:
            raise NoConvergence(f"no infeasible r found below 1 at alpha={alpha}")

    root, info = brentq(
        inverse_q0,
        lo,
        hi,
        xtol=1e-15,
        rtol=4.0 * _EPS,
        maxiter=Config.MAX_ITER,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NoConvergence(f"phase boundary search did not converge at alpha={alpha}")
    logger.debug("r*(%s) = %.12g after %s iterations", alpha, root, info.iterations, extra=_LOG)
    return float(root)


def weight_density(p: ControlPoint, w: ArrayLike) -> ArrayOrFloat:
    """Density of the sample-averaged weight distribution Normal(1, q0 - 1).

    At q0 = 1 the distribution is a point mass at w = 1, reported as an
    infinite density there and zero elsewhere.
    """
    op = solve_order_params(p)
    var = op.q0 - 1.0
    if var <= 0.0:
        arr = np.asarray(w, dtype=float)
        mass = np.where(arr == 1.0, math.inf, 0.0)
        return float(mass) if arr.ndim == 0 else mass
    sigma = math.sqrt(var)
    return norm_pdf((np.asarray(w, dtype=float) - 1.0) / sigma) / sigma


def alpha_slice(alpha: float, r_grid: Iterable[float]) -> list[dict[str, Any]]:
    """Order parameters and error along a fixed-alpha line, one row per r."""
    rows: list[dict[str, Any]] = []
    for r in r_grid:
        row: dict[str, Any] = {
            "alpha": alpha,
            "r": float(r),
            "status": "ok",
            "est_error": None,
            "q0": None,
            "Delta": None,
            "epsilon": None,
            "delta": None,
            "zeta": None,
        }
        try:
            p = ControlPoint(alpha, float(r))
            if p.r >= 1.0:
                raise DomainError(f"slices stop at r = 1, got {p.r}")
            op = solve_order_params(p, locate_boundary=False)
            row.update(
                est_error=math.sqrt(op.q0) - 1.0,
                q0=op.q0,
                Delta=op.Delta,
                epsilon=op.epsilon,
                delta=op.delta,
                zeta=op.zeta,
            )
        except InfeasibleRegion as exc:
            row["status"] = exc.error_type
            # The ratios continue beyond the boundary.
            try:
                row["delta"], row["zeta"] = solve_ratios(p)
            except AtlasError:
                pass
        except AtlasError as exc:
            row["status"] = exc.error_type
        rows.append(row)
    return rows
