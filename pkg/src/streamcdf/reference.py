"""Deliberately naive exact oracles for testing the incremental paths.

Nothing here shares code with the binning kernels: bins are located with
:func:`bisect.bisect_right` over a plain list of edges.
"""
from __future__ import annotations

import bisect
import math
from collections import deque
from fractions import Fraction

from .errors import EmptySketch, InvalidProbability, NonFiniteValue
from .grid import Grid
from .sketch import CdfSketch


def exact_quantile(values, p: float) -> float:
    """Inverted-CDF (type 1) sample quantile: smallest x with ECDF(x) >= p."""
    data = sorted(values)
    if not data:
        raise EmptySketch("exact_quantile of an empty list")
    if not (0.0 <= p <= 1.0):
        raise InvalidProbability(f"probability must be in [0, 1], got {p!r}")
    # exact rational arithmetic so float rounding in p * n cannot shift the rank
    rank = math.ceil(Fraction(p) * len(data))
    return data[max(rank, 1) - 1]


def exact_window_counts(values, grid: Grid) -> CdfSketch:
    edges = [float(e) for e in grid.edges]
    counts = [0] * (len(edges) + 1)
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            raise NonFiniteValue(f"non-finite value {v!r}")
        counts[bisect.bisect_right(edges, v)] += 1
    return CdfSketch(grid, counts)


class ExactWindow:
    """Raw values of the last ``size`` samples, oldest first."""

    def __init__(self, size: int):
        self.size = size
        self._values = deque(maxlen=size)

    def push(self, value: float):
        self._values.append(float(value))

    def extend(self, values):
        self._values.extend(float(v) for v in values)

    def values(self) -> list[float]:
        return list(self._values)

    def __len__(self):
        return len(self._values)

    def quantile(self, p: float) -> float:
        return exact_quantile(self._values, p)

    def counts(self, grid: Grid) -> CdfSketch:
        return exact_window_counts(self._values, grid)
