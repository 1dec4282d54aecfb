from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from errors import DomainError
from simulator import SampleSpec, generate_returns


def test_same_seed_and_index_reproduce() -> None:
    spec = SampleSpec(4, 30, master_seed=42)
    assert np.array_equal(generate_returns(spec, 3), generate_returns(spec, 3))
    assert not np.array_equal(generate_returns(spec, 3), generate_returns(spec, 4))
    other = SampleSpec(4, 30, master_seed=43)
    assert not np.array_equal(generate_returns(spec, 3), generate_returns(other, 3))


def test_shorter_horizon_is_a_prefix() -> None:
    short = SampleSpec(6, 20, master_seed=9)
    long_ = short.with_horizon(55)
    full = generate_returns(long_, 2)
    assert full.shape == (6, 55)
    assert np.array_equal(generate_returns(short, 2), full[:, :20])


def test_gaussian_moments() -> None:
    x = generate_returns(SampleSpec(500, 2000, master_seed=1), 0)
    assert abs(x.mean()) < 5e-3
    assert x.var() == pytest.approx(1.0, abs=0.01)


def test_student_returns_have_excess_kurtosis() -> None:
    x = generate_returns(SampleSpec(500, 2000, "student", 3.0, master_seed=1), 0)
    assert stats.kurtosis(x.ravel()) > 1.0


def test_student_returns_are_heavier_tailed() -> None:
    gauss = generate_returns(SampleSpec(20, 1000, master_seed=3), 0)
    student = generate_returns(SampleSpec(20, 1000, "student", 3.0, master_seed=3), 0)
    assert np.all(np.isfinite(student))
    assert np.abs(student).max() > np.abs(gauss).max()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_assets": 0, "horizon": 10},
        {"n_assets": 3, "horizon": 0},
        {"n_assets": 3, "horizon": 10, "distribution": "cauchy"},
        {"n_assets": 3, "horizon": 10, "distribution": "student", "nu": 2.0},
        {"n_assets": 3, "horizon": 10, "distribution": "student"},
        {"n_assets": 3, "horizon": 10, "master_seed": -1},
    ],
)
def test_invalid_specs(kwargs: dict) -> None:
    with pytest.raises(DomainError):
        SampleSpec(**kwargs)


def test_negative_index_rejected() -> None:
    with pytest.raises(DomainError):
        generate_returns(SampleSpec(2, 2), -1)


def test_from_cli() -> None:
    spec = SampleSpec.from_cli("student:4", 10, 40, 1)
    assert (spec.distribution, spec.nu, spec.r) == ("student", 4.0, 0.25)
    assert spec.label() == "student:4"
    assert SampleSpec.from_cli("Gaussian", 10, 40, 1).label() == "gaussian"
    for bad in ("student:x", "student", "gaussian:3", "levy"):
        with pytest.raises(DomainError):
            SampleSpec.from_cli(bad, 10, 40, 1)
