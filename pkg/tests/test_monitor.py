import json

import numpy as np
import pytest

from streamcdf import (
    AlertRule,
    CumulativeEstimator,
    InvalidConfig,
    WindowConfig,
    WindowEstimator,
    build_uniform_grid,
    emit_report,
    evaluate_rules,
    parse_rule,
)
from streamcdf.reference import ExactWindow

G = build_uniform_grid(0, 100, 100)


def test_parse_rule():
    r = parse_rule("p99>250")
    assert (r.p, r.comparator, r.threshold, r.rule_id) == (0.99, ">", 250.0, "p99>250")
    assert parse_rule("p99.9>=1e3").p == 0.999
    assert parse_rule(" p50 < -2.5 ").comparator == "<"
    assert parse_rule("p5<=3").p == 0.05
    for bad in ("p100>3", "p0>3", "q99>3", "p99>", "p99=3", "p99>nan", "p99>inf"):
        with pytest.raises(InvalidConfig):
            parse_rule(bad)


def test_rule_default_id():
    assert AlertRule(0.999, ">", 250.0).rule_id == "p99.9>250"


def test_evaluate_rules_basic():
    est = CumulativeEstimator(G)
    assert evaluate_rules(est, [parse_rule("p50>0")]) == []
    est.push_many([3, 4, 5])
    assert evaluate_rules(est, []) == []
    fired = evaluate_rules(est, [parse_rule("p50>0"), parse_rule("p50<0")])
    assert [a.rule_id for a in fired] == ["p50>0"]
    assert fired[0].observed == est.quantile(0.5)


def test_threshold_monotonicity():
    rng = np.random.default_rng(0)
    est = CumulativeEstimator(G)
    est.push_many(rng.uniform(0, 100, 500))
    fired = [bool(evaluate_rules(est, [AlertRule(0.9, ">", t)])) for t in np.linspace(0, 100, 101)]
    assert fired == sorted(fired, reverse=True)


def spike_trace(n=10_000, spike_at=8000, seed=7):
    rng = np.random.default_rng(seed)
    base = 10 + rng.uniform(-2, 2, n)
    base[spike_at:] = 500 + rng.uniform(-20, 20, n - spike_at)
    return base


@pytest.mark.parametrize("interval", [10, 100])
def test_spike_detection(interval):
    trace = spike_trace()
    grid = build_uniform_grid(0, 1000, 1000)
    est = WindowEstimator(WindowConfig(1000, 100), grid)
    exact = ExactWindow(1000)
    rule = parse_rule("p99>250")
    first = None
    for start in range(0, trace.size, interval):
        chunk = trace[start:start + interval]
        est.push_many(chunk)
        exact.extend(chunk)
        report = emit_report(est, [0.99], 0.95, [rule], now=0.0)
        if report.alerts and first is None:
            first = est.samples_seen
            # the sort-based p99 of the exact window agrees that it is an anomaly
            assert exact.quantile(0.99) > 250
        if est.samples_seen <= 8000:
            assert not report.alerts
    ten_in = 8010
    assert ten_in <= first <= ten_in + interval


def test_report_shape_and_consistency():
    est = WindowEstimator(WindowConfig(200, 20), G)
    est.push_many(np.random.default_rng(1).uniform(0, 100, 321))
    rules = [parse_rule("p99>50"), parse_rule("p50<10")]
    report = emit_report(est, [0.5, 0.9, 0.99], 0.9, rules, stream_id="api", skipped=3, now=12.0)
    d = report.to_dict()
    assert set(d["quantiles"]) == {"0.5", "0.9", "0.99"}
    assert d["stream"] == "api" and d["skipped"] == 3 and d["iid_assumed"] is True
    assert d["n"] == est.query_sketch().total
    for p in (0.5, 0.9, 0.99):
        entry = d["quantiles"][repr(p)]
        assert entry["value"] == est.quantile(p)
        assert entry["lo"] <= entry["value"] <= entry["hi"]
    assert [a["rule"] for a in d["alerts"]] == ["p99>50"]
    assert d["alerts"][0]["observed"] == d["quantiles"]["0.99"]["value"]
    json.dumps(d)


def test_single_sample_report():
    est = CumulativeEstimator(G)
    est.push(42.0)
    report = emit_report(est, [0.5], now=0.0)
    assert report.n == 1
    assert report.quantiles[0.5].value == est.quantile(0.5)


def test_warmup_gate():
    est = WindowEstimator(WindowConfig(100, 10), G)
    est.push_many(np.full(50, 90.0))
    rule = parse_rule("p50>10")
    assert emit_report(est, [0.5], rules=[rule], now=0.0).alerts == []
    assert emit_report(est, [0.5], rules=[rule], warmup_gate=False, now=0.0).alerts
    est.push_many(np.full(50, 90.0))
    assert emit_report(est, [0.5], rules=[rule], now=0.0).alerts


def test_empty_estimator_report():
    est = WindowEstimator(WindowConfig(100, 10), G)
    report = emit_report(est, [0.5], rules=[parse_rule("p50>1")], warmup_gate=False, now=0.0)
    assert report.n == 0 and report.alerts == []
    assert report.to_dict()["quantiles"]["0.5"]["value"] is None


def test_determinism():
    trace = spike_trace(n=3000, spike_at=2000)

    def reports():
        est = WindowEstimator(WindowConfig(500, 50), build_uniform_grid(0, 1000, 200))
        out = []
        for start in range(0, trace.size, 100):
            est.push_many(trace[start:start + 100])
            out.append(emit_report(est, [0.5, 0.99], 0.95, [parse_rule("p99>250")], now=0.0).to_dict())
        return out

    assert reports() == reports()
