import numpy as np
import pytest

from streamcdf import (
    InvalidRange,
    InvalidShares,
    NonFiniteValue,
    bin_index,
    build_tail_weighted_grid,
    build_uniform_grid,
)
from streamcdf.grid import TAIL_WEIGHTED, UNIFORM, Grid


@pytest.mark.parametrize(
    "lo, hi, bins, expected",
    [
        (0, 10, 10, np.arange(11.0)),
        (0, 1, 1, [0.0, 1.0]),
        (-5, 5, 4, [-5.0, -2.5, 0.0, 2.5, 5.0]),
    ],
)
def test_uniform_edges(lo, hi, bins, expected):
    grid = build_uniform_grid(lo, hi, bins)
    assert grid.kind == UNIFORM
    np.testing.assert_array_equal(grid.edges, expected)


@pytest.mark.parametrize("args", [(1, 1, 4), (2, 1, 4), (0, 1, 0), (0, float("inf"), 3), (0, 1, 2.5)])
def test_uniform_rejects_bad_range(args):
    with pytest.raises(InvalidRange):
        build_uniform_grid(*args)


def test_uniform_widths_equal():
    grid = build_uniform_grid(-3.7, 1e4 + 0.3, 997)
    w = grid.widths
    assert np.all(np.abs(w - w.mean()) <= 1e-9 * w.mean())


def test_tail_weighted_allocation():
    grid = build_tail_weighted_grid(0, 100, 10, 10, 90, (0.3, 0.4, 0.3))
    assert grid.kind == TAIL_WEIGHTED
    expected = [0, 10 / 3, 20 / 3, 10, 30, 50, 70, 90, 90 + 10 / 3, 90 + 20 / 3, 100]
    np.testing.assert_allclose(grid.edges, expected, rtol=0, atol=1e-12)
    w = grid.widths
    np.testing.assert_allclose(w[:3], 10 / 3)
    np.testing.assert_allclose(w[3:7], 20)
    np.testing.assert_allclose(w[7:], 10 / 3)


def test_tail_weighted_minimal_allocation():
    grid = build_tail_weighted_grid(0, 100, 3, 10, 90, (1 / 3, 1 / 3, 1 / 3))
    np.testing.assert_array_equal(grid.edges, [0, 10, 90, 100])


def test_tail_weighted_remainder_goes_to_middle():
    # floor(0.29*100)=29 despite 0.29*100 == 28.999999999999996
    grid = build_tail_weighted_grid(0, 1, 100, 0.05, 0.95, (0.29, 0.42, 0.29))
    assert grid.bins == 100
    assert np.sum(grid.edges < 0.05) == 29
    assert np.sum(grid.edges > 0.95) == 29


def test_tail_weighted_invariants_random():
    rng = np.random.default_rng(3)
    for _ in range(200):
        bins = int(rng.integers(10, 400))
        lo_share, hi_share = rng.uniform(0.05, 0.3, size=2)
        shares = (lo_share, 1 - lo_share - hi_share, hi_share)
        try:
            grid = build_tail_weighted_grid(0.0, 100.0, bins, 5.0, 95.0, shares)
        except InvalidShares:
            continue
        assert grid.bins == bins
        assert np.all(np.diff(grid.edges) > 0)
        w = grid.widths
        seg = np.digitize(grid.edges[:-1], [5.0, 95.0])
        for s in range(3):
            ws = w[seg == s]
            np.testing.assert_allclose(ws, ws[0], rtol=1e-9)
        assert w[seg == 0].max() < w[seg == 1].min()
        assert w[seg == 2].max() < w[seg == 1].min()


@pytest.mark.parametrize(
    "shares",
    [(0.0, 1.0, 0.0), (0.5, 0.6, 0.1), (0.3, 0.4), (-0.1, 0.6, 0.5), (0.05, 0.9, 0.05)],
)
def test_tail_weighted_bad_shares(shares):
    # the last case gives 0 bins to each tail out of 10
    with pytest.raises(InvalidShares):
        build_tail_weighted_grid(0, 100, 10, 10, 90, shares)


def test_tail_weighted_rejects_wide_tails():
    with pytest.raises(InvalidShares):
        build_tail_weighted_grid(0, 100, 10, 45, 55, (0.1, 0.8, 0.1))


@pytest.mark.parametrize("splits", [(10, 10), (90, 10), (0, 50), (50, 100), (-1, 50)])
def test_tail_weighted_bad_order(splits):
    with pytest.raises(InvalidRange):
        build_tail_weighted_grid(0, 100, 10, *splits, (0.3, 0.4, 0.3))


def test_bin_index(backend):
    grid = build_uniform_grid(0, 10, 10)
    assert bin_index(grid, 5.0) == 5
    assert bin_index(grid, -1) == -1
    assert bin_index(grid, 10.0) == grid.bins
    assert bin_index(grid, 0.0) == 0
    assert bin_index(grid, np.nextafter(10.0, 0)) == 9
    with pytest.raises(NonFiniteValue):
        bin_index(grid, float("nan"))
    with pytest.raises(NonFiniteValue):
        bin_index(grid, float("-inf"))


def test_bin_index_matches_edges_everywhere(backend):
    # edges themselves and their float neighbours exercise the uniform fast path's correction
    for grid in (build_uniform_grid(-3.3, 7.1, 37), build_tail_weighted_grid(0, 1, 50, 0.1, 0.9, (0.3, 0.4, 0.3))):
        for j, e in enumerate(grid.edges):
            assert bin_index(grid, e) == j
            assert bin_index(grid, np.nextafter(e, -np.inf)) == j - 1


def test_grid_validation():
    with pytest.raises(InvalidRange):
        Grid(np.array([0.0, 1.0, 1.0]))
    with pytest.raises(InvalidRange):
        Grid(np.array([0.0]))
    assert Grid(np.array([0.0, 1.0])) == build_uniform_grid(0, 1, 1)
