"""Record parsing, per-stream estimator management and NDJSON report output."""
from __future__ import annotations

import csv
import json
import logging
import math
import socket
import sys
import time
from dataclasses import dataclass, field
from typing import IO, NamedTuple

from .errors import InvalidConfig, MalformedRecord, SourceUnavailable, StreamCdfError
from .grid import Grid
from .monitor import AlertRule, emit_report
from .window import CumulativeEstimator, WindowConfig, WindowEstimator

log = logging.getLogger("streamcdf")

DEFAULT_STREAM = "default"
_MAX_LOGGED_SKIPS = 10


class Sample(NamedTuple):
    value: float
    timestamp: float | None = None
    stream_id: str = DEFAULT_STREAM


def _number(raw, what, stream):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise MalformedRecord(f"{what} is not a number: {raw!r}", stream)
    try:
        value = float(raw)
    except OverflowError:
        raise MalformedRecord(f"{what} out of range", stream) from None
    if not math.isfinite(value):
        raise MalformedRecord(f"{what} is not finite: {raw!r}", stream)
    return value


def _parse_ndjson(text: str) -> Sample:
    try:
        obj = json.loads(text)
    except (ValueError, RecursionError):
        raise MalformedRecord("invalid JSON") from None
    if not isinstance(obj, dict):
        raise MalformedRecord("record is not a JSON object")
    stream = obj.get("stream", DEFAULT_STREAM)
    if not isinstance(stream, str):
        raise MalformedRecord(f"stream is not a string: {stream!r}")
    if "v" not in obj:
        raise MalformedRecord("missing required field 'v'", stream)
    value = _number(obj["v"], "v", stream)
    ts = obj.get("ts")
    if ts is not None:
        ts = _number(ts, "ts", stream)
        if ts < 0:
            raise MalformedRecord(f"negative timestamp {ts!r}", stream)
    return Sample(value, ts, stream)


def _parse_csv(text: str) -> Sample:
    try:
        fields = next(csv.reader([text]))
    except (csv.Error, StopIteration):
        raise MalformedRecord("invalid CSV") from None
    if len(fields) not in (2, 3):
        raise MalformedRecord(f"expected ts,v[,stream], got {len(fields)} fields")
    stream = fields[2].strip() if len(fields) == 3 and fields[2].strip() else DEFAULT_STREAM
    try:
        ts = float(fields[0]) if fields[0].strip() else None
        value = float(fields[1])
    except ValueError:
        raise MalformedRecord("non-numeric ts or v", stream) from None
    if not math.isfinite(value):
        raise MalformedRecord(f"v is not finite: {fields[1]!r}", stream)
    if ts is not None and not (math.isfinite(ts) and ts >= 0):
        raise MalformedRecord(f"bad timestamp {fields[0]!r}", stream)
    return Sample(value, ts, stream)


def parse_record(data, fmt: str = "ndjson") -> Sample:
    """Parse one line or datagram.

    Raises
    ------
    MalformedRecord
        For anything that is not a valid record. ``exc.stream_id`` is set
        when the record named its stream before failing.
    """
    if isinstance(data, (bytes, bytearray, memoryview)):
        try:
            data = bytes(data).decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedRecord("record is not valid UTF-8") from None
    text = data.strip()
    if not text:
        raise MalformedRecord("empty record")
    if fmt == "ndjson":
        return _parse_ndjson(text)
    if fmt == "csv":
        return _parse_csv(text)
    raise InvalidConfig(f"unknown record format {fmt!r}")


@dataclass
class IngestConfig:
    grid: Grid
    source: str = "-"
    format: str = "ndjson"
    mode: str = "windowed"
    window: WindowConfig | None = None
    quantiles: tuple[float, ...] = (0.5, 0.9, 0.99)
    confidence: float = 0.95
    report_every: int | None = 1000
    report_seconds: float | None = None
    rules: tuple[AlertRule, ...] = ()
    warmup_gate: bool = True
    max_streams: int = 10_000
    csv_header: bool = False
    udp_idle_timeout: float | None = None

    def validate(self):
        if self.format not in ("ndjson", "csv"):
            raise InvalidConfig(f"unknown format {self.format!r}")
        if self.mode not in ("windowed", "cumulative"):
            raise InvalidConfig(f"unknown mode {self.mode!r}")
        if self.mode == "windowed" and self.window is None:
            raise InvalidConfig("windowed mode needs a window configuration")
        if not self.quantiles or any(not (0.0 < p < 1.0) for p in self.quantiles):
            raise InvalidConfig(f"requested quantiles must lie in (0, 1), got {self.quantiles}")
        if not (0.0 < self.confidence < 1.0):
            raise InvalidConfig(f"confidence must be in (0, 1), got {self.confidence}")
        if (self.report_every is None) == (self.report_seconds is None):
            raise InvalidConfig("set exactly one of report_every / report_seconds")
        if self.report_every is not None and self.report_every < 1:
            raise InvalidConfig("report_every must be a positive sample count")
        if self.report_seconds is not None and not self.report_seconds > 0:
            raise InvalidConfig("report_seconds must be positive")
        if self.max_streams < 1:
            raise InvalidConfig("max_streams must be positive")
        return self

    def new_estimator(self):
        if self.mode == "cumulative":
            return CumulativeEstimator(self.grid)
        return WindowEstimator(self.window, self.grid)


@dataclass
class _StreamState:
    estimator: object
    skipped: int = 0
    pending: int = 0


@dataclass
class IngestSession:
    """Demultiplexes records into per-stream estimators and writes reports."""

    config: IngestConfig
    out: IO[str] = field(default_factory=lambda: sys.stdout)
    clock: object = time.monotonic

    def __post_init__(self):
        self.config.validate()
        self.streams: dict[str, _StreamState] = {}
        self.rejected = 0
        self.skipped = 0
        self.reports = 0
        self._header_pending = self.config.format == "csv" and self.config.csv_header
        self._last_tick = self.clock()

    def _stream(self, stream_id: str) -> _StreamState | None:
        state = self.streams.get(stream_id)
        if state is None:
            if len(self.streams) >= self.config.max_streams:
                self.rejected += 1
                if self.rejected == 1:
                    log.warning("stream cap %d reached; rejecting new stream %r", self.config.max_streams, stream_id)
                return None
            state = self.streams[stream_id] = _StreamState(self.config.new_estimator())
        return state

    def _skip(self, exc: MalformedRecord):
        self.skipped += 1
        if self.skipped <= _MAX_LOGGED_SKIPS:
            log.warning("skipping malformed record: %s", exc)
        state = self._stream(exc.stream_id or DEFAULT_STREAM)
        if state is not None:
            state.skipped += 1

    def feed(self, raw) -> None:
        """Consume one input line or datagram."""
        if self._header_pending:
            if raw.strip():
                self._header_pending = False
            return
        if not raw.strip():
            return
        try:
            sample = parse_record(raw, self.config.format)
        except MalformedRecord as exc:
            self._skip(exc)
            return
        state = self._stream(sample.stream_id)
        if state is None:
            return
        state.estimator.push(sample.value)
        if self.config.report_every is not None:
            state.pending += 1
            if state.pending >= self.config.report_every:
                self._emit(sample.stream_id, state)
        else:
            self.tick()

    def tick(self) -> None:
        """Emit wall-clock cadence reports if the interval has elapsed."""
        if self.config.report_seconds is None:
            return
        now = self.clock()
        if now - self._last_tick >= self.config.report_seconds:
            self._last_tick = now
            for stream_id, state in self.streams.items():
                self._emit(stream_id, state)

    def _emit(self, stream_id: str, state: _StreamState) -> None:
        cfg = self.config
        report = emit_report(
            state.estimator,
            cfg.quantiles,
            cfg.confidence,
            cfg.rules,
            stream_id=stream_id,
            skipped=state.skipped,
            warmup_gate=cfg.warmup_gate,
        )
        state.pending = 0
        # one write per line so concurrent writers never interleave a report
        self.out.write(json.dumps(report.to_dict()) + "\n")
        self.reports += 1

    def finish(self) -> None:
        for stream_id, state in self.streams.items():
            self._emit(stream_id, state)
        self.out.flush()
        if self.skipped:
            log.warning("skipped %d malformed record(s)", self.skipped)
        if self.rejected:
            log.warning("rejected %d record(s) beyond the stream cap", self.rejected)


def _parse_udp(source: str) -> tuple[str, int]:
    hostport = source[len("udp://"):]
    host, sep, port = hostport.rpartition(":")
    if not sep or not port.isdigit():
        raise InvalidConfig(f"expected udp://HOST:PORT, got {source!r}")
    return host.strip("[]") or "0.0.0.0", int(port)


def _serve_udp(session: IngestSession, sock: socket.socket, idle_timeout: float | None):
    poll = session.config.report_seconds or 1.0
    if idle_timeout is not None:
        poll = min(poll, idle_timeout)
    sock.settimeout(poll)
    last_data = time.monotonic()
    while True:
        try:
            datagram = sock.recv(65536)
        except socket.timeout:
            session.tick()
            if idle_timeout is not None and time.monotonic() - last_data >= idle_timeout:
                return
            continue
        last_data = time.monotonic()
        for line in datagram.splitlines():
            session.feed(line)


def open_udp(source: str) -> socket.socket:
    host, port = _parse_udp(source)
    family = socket.AF_INET6 if ":" in host else socket.AF_INET
    sock = socket.socket(family, socket.SOCK_DGRAM)
    try:
        sock.bind((host, port))
    except OSError as exc:
        sock.close()
        raise SourceUnavailable(f"cannot bind {source}: {exc}") from exc
    return sock


def run(config: IngestConfig, out: IO[str] | None = None, stdin: IO[bytes] | None = None, sock=None) -> int:
    """Consume the configured source and write NDJSON reports to ``out``.

    Returns a process exit status: 0 on success, 2 for invalid
    configuration, 1 when the source cannot be opened.
    """
    out = sys.stdout if out is None else out
    try:
        session = IngestSession(config, out)
    except InvalidConfig as exc:
        log.error("invalid configuration: %s", exc)
        return 2
    try:
        if config.source.startswith("udp://"):
            sock = sock or open_udp(config.source)
            try:
                _serve_udp(session, sock, config.udp_idle_timeout)
            except KeyboardInterrupt:
                pass
            finally:
                sock.close()
        elif config.source == "-":
            stream = stdin if stdin is not None else sys.stdin.buffer
            for line in stream:
                session.feed(line)
        else:
            try:
                fh = open(config.source, "rb")
            except OSError as exc:
                raise SourceUnavailable(f"cannot open {config.source}: {exc}") from exc
            with fh:
                for line in fh:
                    session.feed(line)
    except SourceUnavailable as exc:
        log.error("%s", exc)
        return 1
    except InvalidConfig as exc:
        log.error("invalid configuration: %s", exc)
        return 2
    except KeyboardInterrupt:
        pass
    except StreamCdfError as exc:
        log.error("fatal: %s", exc)
        session.finish()
        return 1
    session.finish()
    return 0
