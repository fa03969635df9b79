"""Streaming quantile estimation on fixed-grid histograms.

Cumulative sketches keep one histogram for a stationary stream; sliding
windows keep a ring of per-block histograms and update the window CDF by
adding the newest block and subtracting the oldest.
"""
from .errors import (
    CountSaturation,
    EmptySketch,
    GridMismatch,
    InvalidConfig,
    InvalidProbability,
    InvalidRange,
    InvalidShares,
    InvalidWindowConfig,
    MalformedRecord,
    NegativeCount,
    NonFiniteValue,
    SourceUnavailable,
    StreamCdfError,
)
from .grid import Grid, bin_index, build_tail_weighted_grid, build_uniform_grid
from .ingest import IngestConfig, Sample, parse_record, run
from .kernels import BACKEND
from .monitor import AlertRule, FiredAlert, Report, emit_report, evaluate_rules, parse_rule
from .sketch import CdfSketch, Quantile, cdf_at, insert, merge_counts, quantile, snapshot, subtract_counts
from .uncertainty import Band, cdf_band, inv_normal, quantile_band
from .window import (
    CumulativeEstimator,
    WindowConfig,
    WindowEstimator,
    fill_level,
    new_window_estimator,
    push_sample,
    window_cdf_at,
    window_quantile,
)

__version__ = "0.1.0"
