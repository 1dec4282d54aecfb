"""Synthetic return panels with per-sample counter-based random streams."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from config import Config
from errors import DomainError

SampleMatrix = NDArray[np.float64]

DISTRIBUTIONS = ("gaussian", "student")


@dataclass(frozen=True)
class SampleSpec:
    n_assets: int
    horizon: int
    distribution: str = "gaussian"
    nu: Optional[float] = None
    master_seed: int = Config.DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.n_assets < 1 or self.horizon < 1:
            raise DomainError(f"need N >= 1 and T >= 1, got N={self.n_assets}, T={self.horizon}")
        if self.distribution not in DISTRIBUTIONS:
            raise DomainError(f"unknown distribution {self.distribution!r}")
        if self.distribution == "student":
            if self.nu is None or not math.isfinite(self.nu) or self.nu <= 2.0:
                raise DomainError(f"Student returns need nu > 2, got nu={self.nu}")
        if self.master_seed < 0:
            raise DomainError("master_seed must be non-negative")

    @property
    def r(self) -> float:
        return self.n_assets / self.horizon

    @classmethod
    def from_cli(cls, dist: str, n_assets: int, horizon: int, seed: int) -> "SampleSpec":
        """Build a spec from a ``gaussian`` or ``student:NU`` token."""
        name, _, param = dist.partition(":")
        name = name.strip().lower()
        if name == "student":
            try:
                nu = float(param)
            except ValueError as exc:
                raise DomainError(f"expected student:NU, got {dist!r}") from exc
            return cls(n_assets, horizon, "student", nu, seed)
        if param:
            raise DomainError(f"gaussian takes no parameter, got {dist!r}")
        return cls(n_assets, horizon, name, None, seed)

    def with_horizon(self, horizon: int) -> "SampleSpec":
        return dataclasses.replace(self, horizon=horizon)

    def label(self) -> str:
        return "gaussian" if self.distribution == "gaussian" else f"student:{self.nu:g}"

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def sample_rng(master_seed: int, sample_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, sample_index])))


def generate_returns(spec: SampleSpec, sample_index: int) -> SampleMatrix:
    """N x T panel of i.i.d. returns for one sample.

    Draws are laid out time-major, so the panel for horizon T is the first
    T columns of the panel for any longer horizon with the same seed and
    index. Student draws are raw t-variates without variance scaling.
    """
    if sample_index < 0:
        raise DomainError("sample_index must be non-negative")
    rng = sample_rng(spec.master_seed, sample_index)
    shape = (spec.horizon, spec.n_assets)
    if spec.distribution == "student":
        draws = rng.standard_t(spec.nu, size=shape)
    else:
        draws = rng.standard_normal(size=shape)
    return np.ascontiguousarray(draws.T)
