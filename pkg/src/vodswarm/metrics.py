"""Session metrics (RC, IC, RST, CS) and replication aggregation with 95% CIs."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from scipy.stats import t as _student_t


@dataclass(frozen=True)
class SessionRecord:
    """One completed client session, as emitted at termination."""

    duration: float
    misses: int | None
    t: int
    f_size: int
    r_down: float
    initial: bool

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("session duration must be positive")
        if self.misses is not None and not 0 <= self.misses <= self.t:
            raise ValueError("miss count out of range")


def session_rc(rec: SessionRecord) -> float:
    """Retrieval competitiveness: ideal exclusive-channel time over actual."""
    return (rec.f_size / rec.r_down) / rec.duration


def session_ic(rec: SessionRecord) -> float | None:
    """Interruption continuity: distinct missed pieces over total pieces."""
    if rec.misses is None:
        return None
    return rec.misses / rec.t


def session_rst(rec: SessionRecord) -> float:
    """Relative session time: seconds of session per file piece."""
    return rec.duration / rec.t


@dataclass(frozen=True)
class RunSummary:
    """Per-run means over completed sessions (warm-up cohort excluded)."""

    rc_mean: float
    ic_mean: float | None
    rst_mean: float
    cs: int


def summarize_run(records: list[SessionRecord]) -> RunSummary:
    """Fold one run's session records; sessions flagged initial are warm-up."""
    steady = [r for r in records if not r.initial]
    if not steady:
        return RunSummary(math.nan, None, math.nan, 0)
    rcs = [session_rc(r) for r in steady]
    rsts = [session_rst(r) for r in steady]
    ics = [session_ic(r) for r in steady]
    ic_mean = None if ics[0] is None else statistics.fmean(ics)
    return RunSummary(statistics.fmean(rcs), ic_mean, statistics.fmean(rsts), len(steady))


@dataclass(frozen=True)
class MetricsReport:
    """Cross-replication grand means with 95% CI half-widths (None if R < 2)."""

    rc_mean: float
    rc_ci: float | None
    ic_mean: float | None
    ic_ci: float | None
    rst_mean: float
    rst_ci: float | None
    cs_mean: float
    cs_ci: float | None
    runs: int


def _mean_ci(values: list[float]) -> tuple[float, float | None]:
    r = len(values)
    mean = statistics.fmean(values)
    if r < 2 or math.isnan(mean):  # a run with no steady sessions voids the CI
        return mean, None
    half = float(_student_t.ppf(0.975, r - 1)) * statistics.stdev(values) / math.sqrt(r)
    return mean, half


def aggregate(summaries: list[RunSummary]) -> MetricsReport:
    """Grand mean over per-run means; CI half-width = t(0.975, R-1) * s / sqrt(R)."""
    if not summaries:
        raise ValueError("no runs to aggregate")
    rc_mean, rc_ci = _mean_ci([s.rc_mean for s in summaries])
    rst_mean, rst_ci = _mean_ci([s.rst_mean for s in summaries])
    cs_mean, cs_ci = _mean_ci([float(s.cs) for s in summaries])
    if any(s.ic_mean is None for s in summaries):
        ic_mean, ic_ci = None, None
    else:
        ic_mean, ic_ci = _mean_ci([s.ic_mean for s in summaries])
    return MetricsReport(
        rc_mean, rc_ci, ic_mean, ic_ci, rst_mean, rst_ci, cs_mean, cs_ci, len(summaries)
    )
