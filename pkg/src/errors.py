"""Exception hierarchy shared by the solvers, the simulator and the CLI."""

from __future__ import annotations

from typing import Optional


class AtlasError(Exception):
    exit_code = 1
    error_type = "error"


class DomainError(AtlasError, ValueError):
    """An argument lies outside the operation's domain."""

    exit_code = 2
    error_type = "out_of_domain"


class InfeasibleRegion(AtlasError):
    """The control point lies on or beyond the phase boundary."""

    exit_code = 3
    error_type = "infeasible"

    def __init__(self, message: str, boundary: Optional[float] = None) -> None:
        super().__init__(message)
        self.boundary = boundary


class NoConvergence(AtlasError):
    exit_code = 4
    error_type = "no_convergence"


class NumericalError(AtlasError):
    exit_code = 4
    error_type = "numerical"


class AllInfeasible(AtlasError):
    """Every sample of an ensemble produced an unbounded LP."""

    exit_code = 3
    error_type = "all_infeasible"


class EmptyContour(AtlasError):
    exit_code = 5
    error_type = "empty_contour"
