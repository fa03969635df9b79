"""Sliding-window and cumulative CDF estimators.

A window of ``W = k * B`` samples is kept as a ring of ``k`` per-block
histograms. When the forming block fills, it is added to the running
aggregate and the oldest block is subtracted, so the aggregate always
equals the histogram of the last ``W`` block-aligned samples without ever
revisiting raw values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CountSaturation, InvalidWindowConfig, NegativeCount, NonFiniteValue
from .grid import UNIFORM, Grid
from .sketch import INT64_MAX, CdfSketch, Quantile, as_values

_HEAD, _RING_LEN, _STAGED, _SEEN = range(4)


@dataclass(frozen=True)
class WindowConfig:
    window_samples: int
    block_samples: int

    def __post_init__(self):
        w, b = self.window_samples, self.block_samples
        if int(w) != w or int(b) != b or w < 1 or b < 1:
            raise InvalidWindowConfig(f"window and block sizes must be positive integers, got W={w}, B={b}")
        if w % b:
            raise InvalidWindowConfig(f"window {w} is not a multiple of block {b}")
        if w // b < 2:
            raise InvalidWindowConfig(f"window {w} must hold at least two blocks of {b}")

    @property
    def blocks(self) -> int:
        return self.window_samples // self.block_samples


class _QueryMixin:
    """CDF/quantile queries answered from :meth:`query_sketch`."""

    def cdf_at(self, x: float) -> float:
        return self.query_sketch().cdf_at(x)

    def quantile(self, p: float) -> float:
        return self.query_sketch().quantile(p)

    def quantile_with_flag(self, p: float) -> Quantile:
        return self.query_sketch().quantile_with_flag(p)


class WindowEstimator(_QueryMixin):
    """Moving-window empirical CDF over the most recent ``W`` samples.

    Queries cover the full blocks in the ring plus the partially filled
    forming block, normalised by their combined count. Before the window
    first fills this is simply every sample seen so far.

    Parameters
    ----------
    config : WindowConfig
    grid : Grid
    """

    mode = "windowed"

    def __init__(self, config: WindowConfig, grid: Grid):
        self.config = config
        self.grid = grid
        nslots = grid.bins + 2
        self._ring = np.zeros((config.blocks, nslots), dtype=np.int64)
        self._staging = np.zeros(nslots, dtype=np.int64)
        self._aggregate = np.zeros(nslots, dtype=np.int64)
        self._state = np.zeros(4, dtype=np.int64)
        self._one = np.zeros(1, dtype=np.float64)
        self._uniform = grid.kind == UNIFORM

    @property
    def samples_seen(self) -> int:
        return int(self._state[_SEEN])

    @property
    def ring_length(self) -> int:
        return int(self._state[_RING_LEN])

    def _advance(self, values: np.ndarray) -> int:
        if values.size > INT64_MAX - self.samples_seen:
            raise CountSaturation("samples_seen would exceed 64-bit range")
        crossed = kernels.window_push(
            self.grid.edges,
            self._uniform,
            values,
            self._staging,
            self._ring,
            self._aggregate,
            self._state,
            self.config.block_samples,
        )
        if crossed < 0:
            raise NegativeCount("evicted block exceeds aggregate; window bookkeeping is corrupt")
        return crossed

    def push(self, value: float) -> "WindowEstimator":
        if not math.isfinite(value):
            raise NonFiniteValue(f"non-finite value {value!r}")
        self._one[0] = value
        self._advance(self._one)
        return self

    def push_many(self, values) -> int:
        """Push a batch in order; returns the number of block boundaries crossed."""
        return self._advance(as_values(values))

    # -- state views ----------------------------------------------------

    @property
    def aggregate(self) -> CdfSketch:
        total = self.ring_length * self.config.block_samples
        return CdfSketch(self.grid, self._aggregate, _total=total, _frozen=True)

    @property
    def staging(self) -> CdfSketch:
        return CdfSketch(self.grid, self._staging, _total=int(self._state[_STAGED]), _frozen=True)

    def blocks(self) -> list[CdfSketch]:
        """Full blocks in the ring, oldest (next to be evicted) first."""
        head, k, b = int(self._state[_HEAD]), self.config.blocks, self.config.block_samples
        return [
            CdfSketch(self.grid, self._ring[(head + i) % k], _total=b, _frozen=True)
            for i in range(self.ring_length)
        ]

    def query_sketch(self) -> CdfSketch:
        """Immutable merge of the aggregate and the forming block."""
        total = self.ring_length * self.config.block_samples + int(self._state[_STAGED])
        return CdfSketch(self.grid, self._aggregate + self._staging, _total=total, _frozen=True)

    def fill_level(self) -> float:
        return min(1.0, self.samples_seen / self.config.window_samples)

    def state_size(self) -> int:
        """Integer counters held across ring, forming block, aggregate and bookkeeping."""
        return self._ring.size + self._staging.size + self._aggregate.size + self._state.size


class CumulativeEstimator(_QueryMixin):
    """Stationary-mode estimator: one sketch over every sample ever seen."""

    mode = "cumulative"

    def __init__(self, grid: Grid):
        self.grid = grid
        self._sketch = CdfSketch(grid)

    @property
    def samples_seen(self) -> int:
        return self._sketch.total

    def push(self, value: float) -> "CumulativeEstimator":
        self._sketch.insert(value)
        return self

    def push_many(self, values) -> int:
        self._sketch.insert_many(values)
        return 0

    def query_sketch(self) -> CdfSketch:
        return self._sketch.snapshot()

    def fill_level(self) -> float:
        return 1.0 if self._sketch.total else 0.0

    def state_size(self) -> int:
        return self._sketch.state_size()


def new_window_estimator(config: WindowConfig, grid: Grid) -> WindowEstimator:
    return WindowEstimator(config, grid)


def push_sample(est: WindowEstimator, value: float) -> WindowEstimator:
    return est.push(value)


def window_cdf_at(est: WindowEstimator, x: float) -> float:
    return est.cdf_at(x)


def window_quantile(est: WindowEstimator, p: float) -> float:
    return est.quantile(p)


def fill_level(est) -> float:
    return est.fill_level()
