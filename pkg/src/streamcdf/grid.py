"""Bin-edge grids that define a sketch's value resolution."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidRange, InvalidShares, NonFiniteValue

UNIFORM = "uniform"
TAIL_WEIGHTED = "tail-weighted"

# tolerance for float products like 0.29 * 100 landing just under an integer
_ALLOC_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing bin edges with half-open bins ``[e_k, e_{k+1})``.

    Parameters
    ----------
    edges : array_like
        ``B + 1`` finite, strictly increasing values.
    kind : str
        ``"uniform"`` or ``"tail-weighted"``. Uniform grids use an O(1)
        arithmetic bin lookup in the compiled kernel.
    """

    edges: np.ndarray
    kind: str = UNIFORM
    _widths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = np.ascontiguousarray(self.edges, dtype=np.float64)
        if edges.ndim != 1 or edges.shape[0] < 2:
            raise InvalidRange("a grid needs at least two edges")
        if not np.all(np.isfinite(edges)):
            raise InvalidRange("grid edges must be finite")
        if not np.all(np.diff(edges) > 0):
            raise InvalidRange("grid edges must be strictly increasing")
        if self.kind not in (UNIFORM, TAIL_WEIGHTED):
            raise InvalidRange(f"unknown grid kind {self.kind!r}")
        edges.setflags(write=False)
        widths = np.diff(edges)
        widths.setflags(write=False)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_widths", widths)

    @property
    def bins(self) -> int:
        return self.edges.shape[0] - 1

    @property
    def widths(self) -> np.ndarray:
        return self._widths

    @property
    def lo(self) -> float:
        return float(self.edges[0])

    @property
    def hi(self) -> float:
        return float(self.edges[-1])

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.kind, self.edges.tobytes()))

    def __repr__(self):
        return f"Grid(kind={self.kind!r}, bins={self.bins}, range=[{self.lo:g}, {self.hi:g}))"

    def slot(self, value: float) -> int:
        """Counter-array slot of ``value``: 0 underflow, ``k + 1`` bin k, ``B + 1`` overflow."""
        if not math.isfinite(value):
            raise NonFiniteValue(f"non-finite value {value!r}")
        return kernels.locate(self.edges, self.kind == UNIFORM, float(value))


def build_uniform_grid(lo: float, hi: float, bins: int) -> Grid:
    """Equal-width grid of ``bins`` bins over ``[lo, hi)``."""
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise InvalidRange(f"need finite lo < hi, got {lo!r}, {hi!r}")
    if int(bins) != bins or bins < 1:
        raise InvalidRange(f"bins must be a positive integer, got {bins!r}")
    return Grid(np.linspace(lo, hi, int(bins) + 1), UNIFORM)


def build_tail_weighted_grid(lo, hi, bins, lo_split, hi_split, shares) -> Grid:
    """Three-segment piecewise-uniform grid with finer bins in the tails.

    Segment ``i`` of ``[lo, lo_split)``, ``[lo_split, hi_split)``,
    ``[hi_split, hi)`` receives ``floor(shares[i] * bins)`` bins and any
    remainder goes to the middle segment.

    Raises
    ------
    InvalidRange
        If ``lo < lo_split < hi_split < hi`` does not hold.
    InvalidShares
        If shares are not three positive fractions summing to one, a segment
        would receive no bins, or the tail bins would not be narrower than
        the middle bins.
    """
    points = (lo, lo_split, hi_split, hi)
    if not all(math.isfinite(v) for v in points):
        raise InvalidRange("grid bounds and splits must be finite")
    if not (lo < lo_split < hi_split < hi):
        raise InvalidRange(f"need lo < lo_split < hi_split < hi, got {points}")
    if int(bins) != bins or bins < 3:
        raise InvalidShares(f"tail-weighted grid needs at least 3 bins, got {bins!r}")
    bins = int(bins)
    shares = tuple(float(s) for s in shares)
    if len(shares) != 3 or any(not s > 0 for s in shares):
        raise InvalidShares(f"shares must be three positive fractions, got {shares}")
    if abs(sum(shares) - 1.0) > 1e-9:
        raise InvalidShares(f"shares must sum to 1, got {sum(shares)}")

    low_n = math.floor(shares[0] * bins + _ALLOC_EPS)
    high_n = math.floor(shares[2] * bins + _ALLOC_EPS)
    mid_n = bins - low_n - high_n
    if min(low_n, mid_n, high_n) < 1:
        raise InvalidShares(f"allocation {low_n}/{mid_n}/{high_n} leaves a segment without bins")

    low = np.linspace(lo, lo_split, low_n + 1)
    mid = np.linspace(lo_split, hi_split, mid_n + 1)
    high = np.linspace(hi_split, hi, high_n + 1)
    mid_width = (hi_split - lo_split) / mid_n
    if (lo_split - lo) / low_n >= mid_width or (hi - hi_split) / high_n >= mid_width:
        raise InvalidShares("tail bins must be narrower than the middle bins")
    return Grid(np.concatenate([low, mid[1:], high[1:]]), TAIL_WEIGHTED)


def bin_index(grid: Grid, value: float) -> int:
    """Locate ``value`` on ``grid``.

    Returns ``-1`` for underflow (``value < edges[0]``), ``grid.bins`` for
    overflow (``value >= edges[-1]``), else the ``k`` with
    ``edges[k] <= value < edges[k+1]``.
    """
    return grid.slot(value) - 1
