"""Shortfall Atlas entry point."""

from __future__ import annotations

import argparse
import math
import sys
import time
from typing import Any, Callable, NamedTuple, Optional, Sequence


from cartography import (
    CONTOUR_COLUMNS,
    ESTIMATORS,
    GRID_COLUMNS,
    METRICS,
    compare_estimators,
    evaluate_grid,
    parse_grid,
    phase_boundary_curve,
    required_aspect_table,
    trace_contour,
)
from config import Config
from errors import AtlasError, DomainError
from logger.app_logger import logger, run_context, set_level
from parametric import contour_r_param, phi_factor, q0_param, r_crit_param, round_half_away
from replica import ControlPoint, alpha_slice, hat_params, risk_report
from reporting.writers import build_metadata, emit, render_csv, render_json
from simulator import LP_METHODS, SAMPLE_COLUMNS, SampleSpec, run_ensemble, susceptibility_summary
from storage.database import db

_LOG = {"component": "cli"}

SOLVE_COLUMNS = [
    "alpha",
    "r",
    "minimax",
    "est_error",
    "susceptibility",
    "var_proxy",
    "es_out_ratio",
    "es_in_ratio",
    "weight_mean",
    "weight_var",
    "scaled_Delta",
    "q0",
    "Delta",
    "epsilon",
    "delta",
    "zeta",
    "lambda",
    "Delta_hat",
    "q0_hat",
]
SLICE_COLUMNS = ["alpha", "r", "status", "est_error", "q0", "Delta", "epsilon", "delta", "zeta"]
PARAMETRIC_COLUMNS = ["alpha", "phi", "r_crit", "r", "q0", "est_error", "n_assets", "horizon"]
COMPARE_COLUMNS = ["alpha", "error", "historical_r", "parametric_r", "historical_tn", "parametric_tn", "sample_ratio"]
RUN_COLUMNS = ["id", "timestamp", "command", "status", "exit_code", "duration_ms", "artifact_path"]


class CommandOutput(NamedTuple):
    payload: dict[str, Any]
    rows: list[dict[str, Any]]
    columns: list[str]
    samples: Optional[list[dict[str, Any]]] = None


def _percent_list(text: str) -> list[float]:
    try:
        return [float(part) / 100.0 for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated percentages, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def cmd_solve(args: argparse.Namespace) -> CommandOutput:
    report = risk_report(ControlPoint(args.alpha, args.r))
    payload: dict[str, Any] = {"report": report.to_dict(), "hat": None}
    row = {key: value for key, value in report.to_dict().items() if key != "order"}
    if report.order is not None:
        hat = hat_params(report.order)
        payload["hat"] = hat.to_dict()
        row.update(report.order.to_dict())
        row.update(hat.to_dict())
    return CommandOutput(payload, [row], SOLVE_COLUMNS)


def cmd_contour(args: argparse.Namespace) -> CommandOutput:
    line = trace_contour(args.metric, args.level, parse_grid(args.alpha_grid), args.scan_points)
    return CommandOutput(line.to_dict(), line.rows(), CONTOUR_COLUMNS)


def cmd_grid(args: argparse.Namespace) -> CommandOutput:
    grid = evaluate_grid(args.metric, parse_grid(args.alpha_grid), parse_grid(args.r_grid), args.workers)
    payload = {"metric": args.metric, "status_counts": grid.status_counts(), "cells": grid.rows()}
    return CommandOutput(payload, grid.rows(), GRID_COLUMNS)


def cmd_table(args: argparse.Namespace) -> CommandOutput:
    table = required_aspect_table(args.estimator, args.errors, args.alphas)
    return CommandOutput(table.to_dict(), table.rows(), table.columns)


def cmd_boundary(args: argparse.Namespace) -> CommandOutput:
    line = phase_boundary_curve(args.estimator, parse_grid(args.alpha_grid))
    payload = {"estimator": args.estimator, **line.to_dict()}
    rows = [{"alpha": a, "r": r} for a, r, _ in line.points]
    return CommandOutput(payload, rows, ["alpha", "r"])


def cmd_slice(args: argparse.Namespace) -> CommandOutput:
    rows = alpha_slice(args.alpha, parse_grid(args.r_grid).tolist())
    return CommandOutput({"alpha": args.alpha, "rows": rows}, rows, SLICE_COLUMNS)


def cmd_simulate(args: argparse.Namespace) -> CommandOutput:
    spec = SampleSpec.from_cli(args.dist, args.n_assets, args.horizon, args.seed)
    stats = run_ensemble(spec, args.alpha, args.samples, args.method, args.workers)
    payload: dict[str, Any] = {
        "spec": spec.to_dict(),
        "alpha": args.alpha,
        "ensemble": stats.to_dict(),
        "replica": None,
        "susceptibility": None,
    }

    if spec.distribution == "gaussian" and spec.r < 1.0:
        try:
            payload["replica"] = risk_report(ControlPoint(args.alpha, spec.r)).to_dict()
        except AtlasError as exc:
            logger.info("No replica reference at r=%s: %s", spec.r, exc, extra=_LOG)

    if args.shift is not None:
        payload["susceptibility"] = susceptibility_summary(
            spec, args.alpha, args.shift, args.samples, args.method, args.workers, stats=stats
        )

    return CommandOutput(payload, stats.rows, SAMPLE_COLUMNS, samples=stats.rows)


def cmd_parametric(args: argparse.Namespace) -> CommandOutput:
    alpha = args.alpha
    if args.q0 is not None:
        q0 = args.q0
        r = contour_r_param(alpha, q0)
    elif args.r is not None:
        r = args.r
        q0 = q0_param(alpha, r)
    else:
        if not args.error > 0.0:
            raise DomainError(f"error level must be positive, got {args.error}")
        q0 = (1.0 + args.error) ** 2
        r = contour_r_param(alpha, q0)

    row: dict[str, Any] = {
        "alpha": alpha,
        "phi": phi_factor(alpha),
        "r_crit": r_crit_param(alpha),
        "r": r,
        "q0": q0,
        "est_error": math.sqrt(q0) - 1.0,
        "n_assets": args.n_assets,
        "horizon": None,
    }
    if args.n_assets is not None and r > 0.0:
        row["horizon"] = round_half_away(args.n_assets / r)
    return CommandOutput(row, [row], PARAMETRIC_COLUMNS)


def cmd_compare(args: argparse.Namespace) -> CommandOutput:
    result = compare_estimators(args.alpha, args.error)
    return CommandOutput(result, [result], COMPARE_COLUMNS)


def cmd_runs(args: argparse.Namespace) -> CommandOutput:
    rows = [dict(row) for row in db.get_recent_runs(args.limit)]
    return CommandOutput({"runs": rows}, rows, RUN_COLUMNS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shortfall-atlas",
        description="Estimation error of Expected Shortfall optimised portfolios.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {Config.VERSION}")
    parser.add_argument(
        "--log-level",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        default=None,
        help="override ATLAS_LOG_LEVEL for this run",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[argparse.Namespace], CommandOutput], help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--format", choices=("csv", "json"), default="json")
        cmd.add_argument("--out", default=None, help="write the artifact here instead of stdout")
        cmd.set_defaults(func=handler)
        return cmd

    solve = add("solve", cmd_solve, "order parameters and risk metrics at one (alpha, r)")
    solve.add_argument("--alpha", type=float, required=True)
    solve.add_argument("--r", type=float, required=True)

    contour = add("contour", cmd_contour, "trace a level set of a metric")
    contour.add_argument("--metric", choices=METRICS, required=True)
    contour.add_argument("--level", type=float, required=True)
    contour.add_argument("--alpha-grid", default=Config.DEFAULT_ALPHA_GRID, help="LO:HI:STEP or a comma list")
    contour.add_argument("--scan-points", type=int, default=120)

    grid = add("grid", cmd_grid, "evaluate a metric on an (alpha, r) grid")
    grid.add_argument("--metric", choices=METRICS, required=True)
    grid.add_argument("--alpha-grid", default=Config.DEFAULT_ALPHA_GRID)
    grid.add_argument("--r-grid", default="0.01:0.99:0.01")
    grid.add_argument("--workers", type=int, default=None)

    table = add("table", cmd_table, "required T/N for given relative errors")
    table.add_argument("--estimator", choices=ESTIMATORS, default="historical")
    table.add_argument("--errors", type=_percent_list, default=None, help="percentages, e.g. 5,10,15,20,25,50")
    table.add_argument("--alphas", type=_float_list, default=None)

    boundary = add("boundary", cmd_boundary, "critical r as a function of alpha")
    boundary.add_argument("--estimator", choices=ESTIMATORS, default="historical")
    boundary.add_argument("--alpha-grid", default=Config.DEFAULT_ALPHA_GRID)

    slice_ = add("slice", cmd_slice, "order parameters along a fixed alpha")
    slice_.add_argument("--alpha", type=float, required=True)
    slice_.add_argument("--r-grid", default="0.005:0.5:0.005")

    simulate = add("simulate", cmd_simulate, "Monte Carlo ensemble of ES linear programs")
    simulate.add_argument("--dist", default="gaussian", help="gaussian or student:NU")
    simulate.add_argument("--N", dest="n_assets", type=int, required=True)
    simulate.add_argument("--T", dest="horizon", type=int, required=True)
    simulate.add_argument("--alpha", type=float, required=True)
    simulate.add_argument("--samples", type=int, default=Config.DEFAULT_SAMPLES)
    simulate.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
    simulate.add_argument("--shift", type=float, default=None, help="also estimate the susceptibility with this xi")
    simulate.add_argument("--method", choices=LP_METHODS, default=None)
    simulate.add_argument("--workers", type=int, default=None)

    parametric = add("parametric", cmd_parametric, "closed-form error of the parametric estimate")
    parametric.add_argument("--alpha", type=float, required=True)
    target = parametric.add_mutually_exclusive_group(required=True)
    target.add_argument("--q0", type=float)
    target.add_argument("--r", type=float)
    target.add_argument("--error", type=float, help="relative error sqrt(q0) - 1, e.g. 0.1")
    parametric.add_argument("--N", dest="n_assets", type=int, default=None)

    compare = add("compare", cmd_compare, "historical versus parametric sample requirement")
    compare.add_argument("--alpha", type=float, required=True)
    compare.add_argument("--error", type=float, required=True)

    runs = add("runs", cmd_runs, "list recorded runs")
    runs.add_argument("--limit", type=int, default=20)

    return parser


def _run_config(args: argparse.Namespace) -> dict[str, Any]:
    return {key: value for key, value in sorted(vars(args).items()) if key != "func"}


def render(args: argparse.Namespace, output: CommandOutput) -> str:
    metadata = build_metadata(args.command, _run_config(args))
    if args.format == "csv":
        return render_csv(output.rows, output.columns, metadata)
    return render_json({"metadata": metadata, "result": output.payload})


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        set_level(args.log_level)
    config = _run_config(args)
    record = Config.RECORD_RUNS and args.command != "runs"

    run_id: Optional[int] = None
    if record:
        run_id = db.log_run({"command": args.command, "config": config, "seed": config.get("seed")})

    start = time.monotonic()
    status, exit_code, artifact = "ok", 0, None
    try:
        with run_context(run_id):
            logger.info("Running %s", args.command, extra={**_LOG, "details": config})
            output = args.func(args)
        artifact = emit(render(args, output), args.out)
        if record and output.samples:
            db.log_ensemble_samples(run_id, output.samples)
    except AtlasError as exc:
        status, exit_code = exc.error_type, exc.exit_code
        logger.error(
            "%s failed: %s",
            args.command,
            exc,
            extra={**_LOG, "run_id": run_id, "error_type": exc.error_type},
        )
    except KeyboardInterrupt:
        status, exit_code = "interrupted", 130
        logger.info("%s interrupted", args.command, extra=_LOG)

    if record:
        db.update_run(
            run_id,
            {
                "status": status,
                "exit_code": exit_code,
                "artifact_path": str(artifact) if artifact else None,
                "duration_ms": int((time.monotonic() - start) * 1000),
            },
        )
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
