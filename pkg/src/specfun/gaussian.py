"""Standard normal distribution functions and their integrated helpers.

Psi and W are the first and second antiderivatives of the normal CDF:
Psi' = Phi and W' = Psi. Both are evaluated in closed form on the left half
line and carried to the right half line through the reflection identities

    Phi(x) = 1 - Phi(-x)
    Psi(x) = x + Psi(-x)
    W(x)   = (x^2 + 1)/2 - W(-x)

so no large positive argument ever subtracts two nearly equal terms.
"""

from __future__ import annotations

import math
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import erfcx, ndtr

from errors import DomainError

ArrayOrFloat = Union[float, np.ndarray]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_SQRT_HALF = math.sqrt(0.5)
_DEEP_TAIL = -8.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_GL_MAX_WIDTH = 1.0


def _out(values: np.ndarray, scalar: bool) -> ArrayOrFloat:
    return float(values) if scalar else values


def _as_array(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def norm_pdf(x: ArrayLike) -> ArrayOrFloat:
    arr, scalar = _as_array(x)
    return _out(_INV_SQRT_2PI * np.exp(-0.5 * arr * arr), scalar)


def _cdf(arr: np.ndarray) -> np.ndarray:
    deep = arr < _DEEP_TAIL
    if not np.any(deep):
        return ndtr(arr)
    xd = np.where(deep, arr, _DEEP_TAIL)
    scaled = 0.5 * erfcx(-xd * _SQRT_HALF) * np.exp(-0.5 * xd * xd)
    return np.where(deep, scaled, ndtr(arr))


def norm_cdf(x: ArrayLike) -> ArrayOrFloat:
    arr, scalar = _as_array(x)
    return _out(_cdf(arr), scalar)


def _rational_guess(t: np.ndarray) -> np.ndarray:
    # Abramowitz and Stegun 26.2.23, |error| < 4.5e-4.
    numer = 2.515517 + t * (0.802853 + t * 0.010328)
    denom = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))
    return t - numer / denom


def norm_cdf_inv(p: ArrayLike) -> ArrayOrFloat:
    """Inverse of the standard normal CDF.

    A rational initial guess on the lower tail probability min(p, 1-p) is
    refined against norm_cdf by Halley steps, Newton steps with the
    second-order correction -x u / 2 from Phi'' = -x phi. Working on the lower tail keeps
    the residual free of cancellation; the upper half follows by symmetry.

    Raises DomainError unless every p lies strictly inside (0, 1).
    """
    arr, scalar = _as_array(p)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("norm_cdf_inv requires 0 < p < 1")

    upper = arr > 0.5
    tail = np.where(upper, 1.0 - arr, arr)
    x = -_rational_guess(np.sqrt(-2.0 * np.log(tail)))

    for _ in range(4):
        err = _cdf(x) - tail
        dens = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
        u = np.divide(err, dens, out=np.zeros_like(err), where=dens > 0)
        x = x - u / (1.0 + 0.5 * x * u)

    x = np.where(tail == 0.5, 0.0, x)
    return _out(np.where(upper, -x, x), scalar)


def _psi_left(arr: np.ndarray) -> np.ndarray:
    return arr * _cdf(arr) + _INV_SQRT_2PI * np.exp(-0.5 * arr * arr)


def _w_left(arr: np.ndarray) -> np.ndarray:
    return 0.5 * (arr * arr + 1.0) * _cdf(arr) + 0.5 * arr * _INV_SQRT_2PI * np.exp(-0.5 * arr * arr)


def psi_fn(x: ArrayLike) -> ArrayOrFloat:
    arr, scalar = _as_array(x)
    neg = -np.abs(arr)
    base = _psi_left(neg)
    return _out(np.where(arr > 0, arr + base, base), scalar)


def w_fn(x: ArrayLike) -> ArrayOrFloat:
    arr, scalar = _as_array(x)
    neg = -np.abs(arr)
    base = _w_left(neg)
    return _out(np.where(arr > 0, 0.5 * (arr * arr + 1.0) - base, base), scalar)


def segment_integrals(
    lower: float, width: float, upper: Optional[float] = None
) -> tuple[float, float, float]:
    """Integrals of phi, Phi and Psi over [lower, lower + width].

    Short segments use Gauss-Legendre quadrature, which keeps full relative
    accuracy as the width shrinks to zero. Long segments use differences of
    the closed forms, reflected onto the left half line when the segment's
    centre is positive.

    Pass ``upper`` when the caller holds the right endpoint exactly; for very
    long segments lower + width loses the digits of the endpoint.
    """
    if width <= _GL_MAX_WIDTH:
        half = 0.5 * width
        nodes = lower + half * (_GL_NODES + 1.0)
        weights = half * _GL_WEIGHTS
        dphi = float(np.dot(weights, norm_pdf(nodes)))
        dpsi = float(np.dot(weights, _cdf(nodes)))
        dw = float(np.dot(weights, psi_fn(nodes)))
        return dphi, dpsi, dw

    if upper is None:
        upper = lower + width
    if lower + 0.5 * width > 0.0:
        # Reflect [a, b] onto [-b, -a].
        a, b = -upper, -lower
        dphi = norm_cdf(b) - norm_cdf(a)
        dpsi_ref = psi_fn(b) - psi_fn(a)
        dw_ref = w_fn(b) - w_fn(a)
        dpsi = width - dpsi_ref
        dw = width * (lower + 0.5 * width) + dw_ref
        return float(dphi), float(dpsi), float(dw)

    dphi = norm_cdf(upper) - norm_cdf(lower)
    dpsi = psi_fn(upper) - psi_fn(lower)
    dw = w_fn(upper) - w_fn(lower)
    return float(dphi), float(dpsi), float(dw)
