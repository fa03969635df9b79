"""Binomial (Wald) confidence bands for CDF values and quantiles.

These bands assume i.i.d. samples. Real system telemetry is rarely
independent, so every :class:`Band` carries ``iid_assumed=True`` and
reports surface it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidProbability
from .sketch import CdfSketch

# Acklam's rational approximation to the normal quantile, refined below by
# one Halley step.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2PI = math.sqrt(2.0 * math.pi)


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def inv_normal(p: float) -> float:
    """Standard normal quantile ``z`` with ``|Phi(z) - p| <= 1e-8``."""
    if not (0.0 < p < 1.0):
        raise InvalidProbability(f"inv_normal needs 0 < p < 1, got {p!r}")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    e = normal_cdf(x) - p
    u = e * _SQRT2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    center: float
    confidence: float
    iid_assumed: bool = True
    degenerate: bool = False
    clamped: bool = False


def _sketch_of(source) -> CdfSketch:
    return source if isinstance(source, CdfSketch) else source.query_sketch()


def _z(confidence: float) -> float:
    if not (0.0 < confidence < 1.0):
        raise InvalidProbability(f"confidence must be in (0, 1), got {confidence!r}")
    return inv_normal(0.5 * (1.0 + confidence))


def cdf_band(source, x: float, confidence: float = 0.95) -> Band:
    """Band ``F(x) +/- z * sqrt(F(x) (1 - F(x)) / n)`` clamped to ``[0, 1]``.

    ``source`` is a sketch or any estimator exposing ``query_sketch()``.
    """
    z = _z(confidence)
    sketch = _sketch_of(source)
    f = sketch.cdf_at(x)
    if f <= 0.0 or f >= 1.0:
        return Band(f, f, f, confidence, degenerate=True)
    half = z * math.sqrt(f * (1.0 - f) / sketch.total)
    return Band(max(0.0, f - half), min(1.0, f + half), f, confidence)


def quantile_band(source, p: float, confidence: float = 0.95) -> Band:
    """Value band from inverting the CDF band at nominal probability ``p``."""
    if not (0.0 < p < 1.0):
        raise InvalidProbability(f"quantile band needs 0 < p < 1, got {p!r}")
    z = _z(confidence)
    sketch = _sketch_of(source)
    h = z * math.sqrt(p * (1.0 - p) / max(sketch.total, 1))
    center = sketch.quantile_with_flag(p)
    lo = sketch.quantile_with_flag(max(0.0, p - h))
    hi = sketch.quantile_with_flag(min(1.0, p + h))
    return Band(
        lo.value,
        hi.value,
        center.value,
        confidence,
        degenerate=sketch.total == 1,
        clamped=lo.clamped or hi.clamped or center.clamped,
    )
