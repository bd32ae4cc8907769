"""Regularized incomplete beta function via continued fractions.

Needed for one-sample Kolmogorov-Smirnov tests against Beta marginals of the
stick-breaking sampler. Target accuracy 1e-10 on (0, 1); the implementation
is the classical modified-Lentz evaluation of the continued fraction, with
the symmetry transform applied for x > (a + 1) / (a + b + 2).
"""

from __future__ import annotations

import math

import numpy as np

_MAX_ITER = 300
_EPS = 1e-15
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for it in range(1, _MAX_ITER + 1):
        m2 = 2 * it
        aa = it * (b - it) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + it) * (qab + it) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RuntimeError(f"incomplete beta continued fraction failed for a={a}, b={b}, x={x}")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def beta_cdf(a: float, b: float):
    """Vectorized CDF callback for Beta(a, b), suitable for one-sample KS."""

    def cdf(x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return betainc_reg(a, b, float(arr))
        flat = np.array([betainc_reg(a, b, float(t)) for t in arr.ravel()])
        return flat.reshape(arr.shape)

    return cdf


def _erf_vec(x: np.ndarray) -> np.ndarray:
    """Vectorized erf, Abramowitz-Stegun 7.1.26 (abs error < 1.5e-7)."""
    sign = np.sign(x)
    z = np.abs(x)
    t = 1.0 / (1.0 + 0.3275911 * z)
    poly = t * (
        0.254829592
        + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429)))
    )
    return sign * (1.0 - poly * np.exp(-z * z))


def normal_cdf(x):
    """Standard normal CDF (vectorized; absolute error below 1e-7)."""
    arr = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + _erf_vec(arr / math.sqrt(2.0)))
