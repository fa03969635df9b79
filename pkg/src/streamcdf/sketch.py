"""Grid-binned empirical CDF sketch.

Counters are stored in one int64 array laid out as
``[underflow, bin 0, ..., bin B-1, overflow]`` so that merging and
subtracting sketches is plain array arithmetic.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    CountSaturation,
    EmptySketch,
    GridMismatch,
    InvalidProbability,
    NegativeCount,
    NonFiniteValue,
)
from .grid import UNIFORM, Grid

INT64_MAX = np.iinfo(np.int64).max


class Quantile(NamedTuple):
    value: float
    clamped: bool


def as_values(values) -> np.ndarray:
    """Coerce to a contiguous float64 array, rejecting NaN and infinities."""
    arr = np.ascontiguousarray(values, dtype=np.float64).reshape(-1)
    if arr.size and not np.isfinite(arr).all():
        bad = arr[~np.isfinite(arr)][0]
        raise NonFiniteValue(f"non-finite value {bad!r}")
    return arr


def check_probability(p: float) -> float:
    if not (0.0 <= p <= 1.0):
        raise InvalidProbability(f"probability must be in [0, 1], got {p!r}")
    return float(p)


class CdfSketch:
    """Counts of samples per grid bin, plus underflow and overflow.

    Single writer; hand readers a :meth:`snapshot`.
    """

    __slots__ = ("grid", "_counts", "_total", "_frozen")

    def __init__(self, grid: Grid, counts=None, *, _total=None, _frozen=False):
        self.grid = grid
        if counts is None:
            counts = np.zeros(grid.bins + 2, dtype=np.int64)
            _total = 0
        elif _total is not None:
            counts = counts.copy()
        else:
            counts = np.array(counts, dtype=np.int64)
            if counts.shape != (grid.bins + 2,):
                raise GridMismatch(f"expected {grid.bins + 2} counters, got {counts.shape}")
            if (counts < 0).any():
                raise NegativeCount("counters must be nonnegative")
        self._counts = counts
        self._total = _checked_sum(counts) if _total is None else _total
        self._frozen = _frozen
        if _frozen:
            counts.setflags(write=False)

    @classmethod
    def from_counts(cls, grid, bin_counts, underflow=0, overflow=0):
        counts = np.empty(grid.bins + 2, dtype=np.int64)
        counts[0] = underflow
        counts[1:-1] = bin_counts
        counts[-1] = overflow
        return cls(grid, counts)

    @classmethod
    def from_values(cls, grid, values):
        sketch = cls(grid)
        sketch.insert_many(values)
        return sketch

    # -- counters -------------------------------------------------------

    @property
    def counts(self) -> np.ndarray:
        """Full slot array; read-only view."""
        view = self._counts.view()
        view.setflags(write=False)
        return view

    @property
    def bin_counts(self) -> np.ndarray:
        return self.counts[1:-1]

    @property
    def underflow(self) -> int:
        return int(self._counts[0])

    @property
    def overflow(self) -> int:
        return int(self._counts[-1])

    @property
    def total(self) -> int:
        return self._total

    @property
    def frozen(self) -> bool:
        return self._frozen

    def state_size(self) -> int:
        """Number of integer counters held: ``B + 2`` slots plus the total."""
        return self._counts.size + 1

    def __eq__(self, other):
        if not isinstance(other, CdfSketch):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self._counts, other._counts)

    def __repr__(self):
        return (
            f"CdfSketch({self.grid!r}, total={self.total}, "
            f"underflow={self.underflow}, overflow={self.overflow})"
        )

    # -- updates --------------------------------------------------------

    def _writable(self):
        if self._frozen:
            raise TypeError("sketch snapshot is read-only")

    def insert(self, value: float) -> "CdfSketch":
        self._writable()
        slot = self.grid.slot(value)
        if self._total == INT64_MAX:
            raise CountSaturation("sketch total would exceed 64-bit range")
        self._counts[slot] += 1
        self._total += 1
        return self

    def insert_many(self, values) -> "CdfSketch":
        self._writable()
        arr = as_values(values)
        if arr.size > INT64_MAX - self._total:
            raise CountSaturation("sketch total would exceed 64-bit range")
        kernels.insert_many(self.grid.edges, self.grid.kind == UNIFORM, self._counts, arr)
        self._total += int(arr.size)
        return self

    def add_counts(self, other: "CdfSketch") -> "CdfSketch":
        """In-place counter-wise addition."""
        self._writable()
        _same_grid(self, other)
        if other._total > INT64_MAX - self._total:
            raise CountSaturation("merged total would exceed 64-bit range")
        self._counts += other._counts
        self._total += other._total
        return self

    def remove_counts(self, other: "CdfSketch") -> "CdfSketch":
        """In-place counter-wise subtraction; raises before touching state."""
        self._writable()
        _same_grid(self, other)
        if (other._counts > self._counts).any():
            raise NegativeCount("subtraction would make a counter negative")
        self._counts -= other._counts
        self._total -= other._total
        return self

    def merge(self, other: "CdfSketch") -> "CdfSketch":
        return self.copy().add_counts(other)

    def subtract(self, other: "CdfSketch") -> "CdfSketch":
        return self.copy().remove_counts(other)

    def clear(self):
        self._writable()
        self._counts[:] = 0
        self._total = 0

    def copy(self) -> "CdfSketch":
        return CdfSketch(self.grid, self._counts, _total=self._total)

    def snapshot(self) -> "CdfSketch":
        """Immutable value-equal copy."""
        if self._frozen:
            return self
        return CdfSketch(self.grid, self._counts, _total=self._total, _frozen=True)

    # -- queries --------------------------------------------------------

    def _require_mass(self):
        if self._total == 0:
            raise EmptySketch("sketch holds no samples")

    def cdf_at(self, x: float) -> float:
        """Fraction of mass at or below ``x``, interpolating uniformly within a bin.

        Underflow mass counts as lying below every ``x`` and overflow mass as
        lying at the top edge, so the result is 1 for ``x >= edges[-1]``.
        """
        self._require_mass()
        if not math.isfinite(x):
            raise NonFiniteValue(f"non-finite query point {x!r}")
        slot = self.grid.slot(x)
        if slot == 0:
            return int(self._counts[0]) / self._total
        if slot == self.grid.bins + 1:
            return 1.0
        k = slot - 1
        below = int(self._counts[:slot].sum())
        frac = (x - self.grid.edges[k]) / self.grid.widths[k]
        return float((below + int(self._counts[slot]) * frac) / self._total)

    def quantile_with_flag(self, p: float) -> Quantile:
        """Inverse of :meth:`cdf_at`.

        Empty bins are skipped to the next nonempty bin's left edge. Mass
        that lies in underflow/overflow yields the outer edge with
        ``clamped=True``.
        """
        p = check_probability(p)
        self._require_mass()
        counts = self._counts
        edges = self.grid.edges
        target = p * self._total
        under = int(counts[0])
        if under and (target < under or under == self._total):
            return Quantile(float(edges[0]), True)
        cum = np.cumsum(counts[:-1])  # cum[k] = mass strictly below bin k
        inner = counts[1:-1]
        hit = np.flatnonzero((inner > 0) & (cum[1:] >= target))
        if hit.size == 0:
            return Quantile(float(edges[-1]), True)
        k = int(hit[0])
        value = edges[k] + self.grid.widths[k] * (target - cum[k]) / inner[k]
        return Quantile(float(min(value, edges[k + 1])), False)

    def quantile(self, p: float) -> float:
        return self.quantile_with_flag(p).value


def _same_grid(a: CdfSketch, b: CdfSketch):
    if a.grid is not b.grid and a.grid != b.grid:
        raise GridMismatch("sketches are defined on different grids")


def _checked_sum(counts: np.ndarray) -> int:
    total = int(counts.sum(dtype=object))
    if total > INT64_MAX:
        raise CountSaturation("sketch total exceeds 64-bit range")
    return total


# Functional forms mirroring the method API.


def empty_sketch(grid: Grid) -> CdfSketch:
    return CdfSketch(grid)


def insert(sketch: CdfSketch, value: float) -> CdfSketch:
    return sketch.insert(value)


def merge_counts(a: CdfSketch, b: CdfSketch) -> CdfSketch:
    return a.merge(b)


def subtract_counts(a: CdfSketch, b: CdfSketch) -> CdfSketch:
    return a.subtract(b)


def cdf_at(sketch: CdfSketch, x: float) -> float:
    return sketch.cdf_at(x)


def quantile(sketch: CdfSketch, p: float) -> float:
    return sketch.quantile(p)


def snapshot(sketch: CdfSketch) -> CdfSketch:
    return sketch.snapshot()
