"""``streamcdf`` command: monitor quantiles of an NDJSON/CSV value stream."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import StreamCdfError
from .grid import build_tail_weighted_grid, build_uniform_grid
from .ingest import IngestConfig, run
from .kernels import BACKEND
from .monitor import parse_rule
from .window import WindowConfig


def _pair(text, n, what):
    parts = text.split(":")
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"{what} needs {n} ':'-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be numeric, got {text!r}") from None


def _cadence(text):
    text = text.strip()
    try:
        if text.endswith("s"):
            return None, float(text[:-1])
        return int(text), None
    except ValueError:
        raise argparse.ArgumentTypeError(f"--report-every takes N or Ts, got {text!r}") from None


def _on_off(text):
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="streamcdf",
        description="Streaming grid-histogram quantiles with sliding windows and tail alerts. "
        "Reads records from a file, stdin or UDP and writes one NDJSON report per line.",
    )
    ap.add_argument("--input", default="-", help="file path, '-' for stdin, or udp://HOST:PORT")
    ap.add_argument("--format", choices=("ndjson", "csv"), default="ndjson")
    ap.add_argument("--csv-header", action="store_true", help="skip the first CSV line")
    ap.add_argument("--mode", choices=("windowed", "cumulative"), default="windowed")
    ap.add_argument("--window", type=int, default=10_000, help="window size W in samples")
    ap.add_argument("--block", type=int, default=1_000, help="block size in samples; W must be a multiple")
    ap.add_argument("--bins", type=int, default=1_000)
    ap.add_argument("--range", dest="value_range", default="0:1000", metavar="MIN:MAX",
                    help="grid range; use --range=-5:5 for negative bounds")
    ap.add_argument("--grid", choices=("uniform", "tail"), default="uniform")
    ap.add_argument("--tail-splits", metavar="LO:HI", help="tail segment boundaries (default 10%%/90%% of range)")
    ap.add_argument("--tail-shares", default="0.3:0.4:0.3", metavar="L:M:H")
    ap.add_argument("--quantiles", default="0.5,0.9,0.99")
    ap.add_argument("--confidence", type=float, default=0.95)
    ap.add_argument("--report-every", type=_cadence, default=(1000, None), metavar="N|Ts")
    ap.add_argument("--alert", action="append", default=[], metavar="pXX>V",
                    help="threshold rule, repeatable, e.g. 'p99>250'")
    ap.add_argument("--warmup-gate", type=_on_off, default=True, metavar="on|off")
    ap.add_argument("--max-streams", type=int, default=10_000)
    ap.add_argument("--udp-idle-timeout", type=float, default=None, metavar="SECONDS",
                    help="stop a UDP source after this long without datagrams")
    ap.add_argument("--show-backend", action="store_true", help="print the kernel backend and exit")
    return ap


def config_from_args(args) -> IngestConfig:
    lo, hi = _pair(args.value_range, 2, "--range")
    if args.grid == "uniform":
        grid = build_uniform_grid(lo, hi, args.bins)
    else:
        if args.tail_splits:
            lo_split, hi_split = _pair(args.tail_splits, 2, "--tail-splits")
        else:
            lo_split, hi_split = lo + 0.1 * (hi - lo), lo + 0.9 * (hi - lo)
        shares = _pair(args.tail_shares, 3, "--tail-shares")
        grid = build_tail_weighted_grid(lo, hi, args.bins, lo_split, hi_split, shares)
    try:
        quantiles = tuple(float(q) for q in args.quantiles.split(",") if q.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"--quantiles must be comma-separated numbers, got {args.quantiles!r}") from None
    window = WindowConfig(args.window, args.block) if args.mode == "windowed" else None
    every, seconds = args.report_every
    return IngestConfig(
        grid=grid,
        source=args.input,
        format=args.format,
        mode=args.mode,
        window=window,
        quantiles=quantiles,
        confidence=args.confidence,
        report_every=every,
        report_seconds=seconds,
        rules=tuple(parse_rule(r) for r in args.alert),
        warmup_gate=args.warmup_gate,
        max_streams=args.max_streams,
        csv_header=args.csv_header,
        udp_idle_timeout=args.udp_idle_timeout,
    ).validate()


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="streamcdf: %(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    if args.show_backend:
        print(BACKEND)
        return 0
    try:
        config = config_from_args(args)
    except (StreamCdfError, argparse.ArgumentTypeError) as exc:
        print(f"streamcdf: error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
