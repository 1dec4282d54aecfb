"""Value types shared by the replica solver and the closed-form lines."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, NamedTuple, Optional

from errors import DomainError


@dataclass(frozen=True)
class ControlPoint:
    """A location (alpha, r = N/T) in the confidence-level / aspect-ratio plane."""

    alpha: float
    r: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.alpha) or not 0.0 < self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not math.isfinite(self.r) or self.r <= 0.0:
            raise DomainError(f"r must be positive, got {self.r}")


class RatioSolution(NamedTuple):
    delta: float
    zeta: float


@dataclass(frozen=True)
class OrderParameters:
    q0: float
    Delta: float
    epsilon: float
    delta: float
    zeta: float

    @classmethod
    def from_ratios(cls, delta: float, zeta: float, q0: float) -> "OrderParameters":
        root = math.sqrt(q0)
        return cls(q0=q0, Delta=delta * root, epsilon=zeta * root, delta=delta, zeta=zeta)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class HatParameters:
    """Conjugate variables eliminated from the saddle point.

    ``lam`` is the budget multiplier (lambda is reserved in Python).
    """

    lam: float
    Delta_hat: float
    q0_hat: float

    def to_dict(self) -> dict[str, float]:
        return {"lambda": self.lam, "Delta_hat": self.Delta_hat, "q0_hat": self.q0_hat}


@dataclass(frozen=True)
class MinimaxSolution:
    """Closed-form order parameters on the alpha = 1 (maximal loss) line."""

    rho: float
    scaled_Delta: float
    sqrt_q0: float
    epsilon: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class RiskReport:
    alpha: float
    r: float
    est_error: float
    susceptibility: float
    var_proxy: float
    es_out_ratio: float
    es_in_ratio: float
    weight_mean: float
    weight_var: float
    # (1 - alpha) * Delta stays finite on the alpha = 1 line where Delta does not.
    scaled_Delta: float
    minimax: bool = False
    order: Optional[OrderParameters] = None

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["order"] = self.order.to_dict() if self.order is not None else None
        return data
