"""Quantile threshold rules and per-stream reports."""
from __future__ import annotations

import operator
import re
import time
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

from .errors import InvalidConfig
from .uncertainty import quantile_band

_COMPARATORS = {
    ">": operator.gt,
    "<": operator.lt,
    ">=": operator.ge,
    "<=": operator.le,
}

_RULE_RE = re.compile(r"^\s*p(\d+(?:\.\d+)?)\s*(>=|<=|>|<)\s*(\S+)\s*$")


@dataclass(frozen=True)
class AlertRule:
    p: float
    comparator: str
    threshold: float
    rule_id: str = ""

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise InvalidConfig(f"rule quantile must be in (0, 1), got {self.p!r}")
        if self.comparator not in _COMPARATORS:
            raise InvalidConfig(f"unknown comparator {self.comparator!r}")
        if not (self.threshold == self.threshold and abs(self.threshold) != float("inf")):
            raise InvalidConfig(f"rule threshold must be finite, got {self.threshold!r}")
        if not self.rule_id:
            object.__setattr__(self, "rule_id", f"p{_percent(self.p)}{self.comparator}{self.threshold:g}")

    def holds(self, observed: float) -> bool:
        return _COMPARATORS[self.comparator](observed, self.threshold)


def _percent(p: float) -> str:
    return format(Decimal(repr(p)) * 100, "f").rstrip("0").rstrip(".")


def parse_rule(text: str) -> AlertRule:
    """Parse ``"p99>250"``-style rules; ``p99.9`` means the 0.999 quantile."""
    m = _RULE_RE.match(text)
    if not m:
        raise InvalidConfig(f"cannot parse alert rule {text!r}; expected e.g. 'p99>250'")
    pct, comparator, threshold = m.groups()
    try:
        p = float(Decimal(pct) / 100)
        value = float(threshold)
    except (InvalidOperation, ValueError):
        raise InvalidConfig(f"cannot parse alert rule {text!r}") from None
    return AlertRule(p, comparator, value, rule_id=text.strip())


@dataclass(frozen=True)
class FiredAlert:
    rule_id: str
    observed: float
    threshold: float


@dataclass(frozen=True)
class QuantileEntry:
    value: float | None
    lo: float | None
    hi: float | None
    clamped: bool


@dataclass
class Report:
    stream_id: str
    n: int
    fill: float
    quantiles: dict[float, QuantileEntry]
    alerts: list[FiredAlert] = field(default_factory=list)
    skipped: int = 0
    emitted_at: float = 0.0
    iid_assumed: bool = True

    def to_dict(self) -> dict:
        return {
            "stream": self.stream_id,
            "n": self.n,
            "fill": self.fill,
            "quantiles": {
                quantile_key(p): {"value": q.value, "lo": q.lo, "hi": q.hi, "clamped": q.clamped}
                for p, q in self.quantiles.items()
            },
            "alerts": [
                {"rule": a.rule_id, "observed": a.observed, "threshold": a.threshold}
                for a in self.alerts
            ],
            "skipped": self.skipped,
            "iid_assumed": self.iid_assumed,
            "emitted_at": self.emitted_at,
        }


def quantile_key(p: float) -> str:
    return repr(float(p))


def _sketch_of(source):
    return source.query_sketch() if hasattr(source, "query_sketch") else source


def evaluate_rules(source, rules) -> list[FiredAlert]:
    """Rules whose comparator holds for the current point quantile.

    An empty source yields no alerts.
    """
    sketch = _sketch_of(source)
    if not rules or sketch.total == 0:
        return []
    fired = []
    for rule in rules:
        observed = sketch.quantile(rule.p)
        if rule.holds(observed):
            fired.append(FiredAlert(rule.rule_id, observed, rule.threshold))
    return fired


def emit_report(
    estimator,
    quantiles,
    confidence: float = 0.95,
    rules=(),
    *,
    stream_id: str = "default",
    skipped: int = 0,
    warmup_gate: bool = True,
    now: float | None = None,
) -> Report:
    """Build a report from one snapshot of ``estimator``.

    With ``warmup_gate`` on, alerts are suppressed until the window is full.
    """
    sketch = estimator.query_sketch()
    fill = estimator.fill_level()
    entries = {}
    for p in quantiles:
        if sketch.total == 0:
            entries[p] = QuantileEntry(None, None, None, False)
            continue
        band = quantile_band(sketch, p, confidence)
        entries[p] = QuantileEntry(band.center, band.lo, band.hi, band.clamped)
    alerts = []
    if not (warmup_gate and fill < 1.0):
        alerts = evaluate_rules(sketch, rules)
    return Report(
        stream_id=stream_id,
        n=sketch.total,
        fill=fill,
        quantiles=entries,
        alerts=alerts,
        skipped=skipped,
        emitted_at=time.time() if now is None else now,
    )
