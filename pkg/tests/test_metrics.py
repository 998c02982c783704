"""Per-session metrics, per-run folding, and cross-run aggregation."""

import math
import statistics

import pytest
from scipy import stats

from vodswarm.metrics import (
    RunSummary,
    SessionRecord,
    aggregate,
    session_ic,
    session_rc,
    session_rst,
    summarize_run,
)


def rec(duration, misses=40, t=800, initial=False):
    return SessionRecord(
        duration=duration,
        misses=misses,
        t=t,
        f_size=200 * 1024 * 1024,
        r_down=20 * 1024,
        initial=initial,
    )


def test_session_metric_formulas():
    r = rec(duration=20480.0, misses=200)
    assert session_rc(r) == pytest.approx(0.5)  # ideal 10240 s over actual
    assert session_ic(r) == pytest.approx(0.25)
    assert session_rst(r) == pytest.approx(25.6)


def test_ideal_session_has_rc_one():
    r = rec(duration=10240.0, misses=0)
    assert session_rc(r) == pytest.approx(1.0)
    assert session_ic(r) == 0.0
    assert session_rst(r) == pytest.approx(12.8)


def test_diagnostic_records_have_no_ic():
    r = rec(duration=12000.0, misses=None)
    assert session_ic(r) is None


def test_record_validation():
    with pytest.raises(ValueError):
        rec(duration=0.0)
    with pytest.raises(ValueError):
        rec(duration=100.0, misses=801)


def test_summarize_run_excludes_warmup():
    records = [
        rec(10240.0, misses=0, initial=True),  # warm-up, ignored
        rec(20480.0, misses=400),
        rec(40960.0, misses=200),
    ]
    s = summarize_run(records)
    assert s.cs == 2
    assert s.rc_mean == pytest.approx((0.5 + 0.25) / 2)
    assert s.ic_mean == pytest.approx((0.5 + 0.25) / 2)
    assert s.rst_mean == pytest.approx((25.6 + 51.2) / 2)


def test_summarize_run_with_no_steady_sessions():
    s = summarize_run([rec(10240.0, initial=True)])
    assert s.cs == 0 and s.ic_mean is None
    assert math.isnan(s.rc_mean) and math.isnan(s.rst_mean)


def test_aggregate_grand_mean_and_ci():
    rc = [0.5, 0.6, 0.7, 0.8]
    summaries = [RunSummary(v, 0.3, 20.0, 100) for v in rc]
    rep = aggregate(summaries)
    assert rep.runs == 4
    assert rep.rc_mean == pytest.approx(statistics.fmean(rc))
    want = stats.t.ppf(0.975, 3) * statistics.stdev(rc) / 2
    assert rep.rc_ci == pytest.approx(want)
    assert rep.ic_mean == pytest.approx(0.3)
    assert rep.ic_ci == pytest.approx(0.0)
    assert rep.cs_mean == pytest.approx(100.0)


def test_aggregate_single_run_has_no_ci():
    rep = aggregate([RunSummary(0.5, 0.3, 20.0, 10)])
    assert rep.rc_mean == 0.5
    assert rep.rc_ci is None and rep.cs_ci is None


def test_aggregate_diagnostic_runs_drop_ic():
    rep = aggregate([RunSummary(0.5, None, 20.0, 10), RunSummary(0.6, None, 21.0, 12)])
    assert rep.ic_mean is None and rep.ic_ci is None
    assert rep.rc_ci is not None


def test_aggregate_empty_rejected():
    with pytest.raises(ValueError):
        aggregate([])


def test_aggregate_tolerates_sessionless_runs():
    rep = aggregate([RunSummary(math.nan, None, math.nan, 0), RunSummary(0.5, 0.3, 20.0, 5)])
    assert math.isnan(rep.rc_mean) and rep.rc_ci is None
    assert math.isnan(rep.rst_mean) and rep.rst_ci is None
    assert rep.cs_mean == pytest.approx(2.5)


def test_ci_shrinks_with_replications():
    base = [0.5, 0.7]
    small = aggregate([RunSummary(v, 0.3, 20.0, 1) for v in base])
    large = aggregate([RunSummary(v, 0.3, 20.0, 1) for v in base * 8])
    assert large.rc_ci < small.rc_ci
