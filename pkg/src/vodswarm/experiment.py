"""Replication driver: runs cells, aggregates metrics, emits rows and plot data."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .config import ScenarioConfig, build_config
from .engine import derive_seed
from .metrics import MetricsReport, RunSummary, aggregate, summarize_run
from .simulation import Simulation

CSV_HEADER = (
    "protocol,scenario,setting,profile,s_size,runs,sim_time,"
    "rc,rc_ci,ic,ic_ci,rst,rst_ci,cs,cs_ci"
)


def _fmt(x: float | None) -> str:
    return "na" if x is None else "%.6g" % x


@dataclass(frozen=True)
class ResultRow:
    """One experiment cell's aggregated outcome."""

    protocol: str
    scenario: str
    setting: str
    profile: str
    s_size: int
    runs: int
    sim_time: float
    report: MetricsReport

    def to_csv(self) -> str:
        r = self.report
        return ",".join(
            (
                self.protocol,
                self.scenario,
                self.setting,
                self.profile,
                str(self.s_size),
                str(self.runs),
                _fmt(self.sim_time),
                _fmt(r.rc_mean),
                _fmt(r.rc_ci),
                _fmt(r.ic_mean),
                _fmt(r.ic_ci),
                _fmt(r.rst_mean),
                _fmt(r.rst_ci),
                _fmt(r.cs_mean),
                _fmt(r.cs_ci),
            )
        )


def run_replication(cfg: ScenarioConfig, run_idx: int) -> RunSummary:
    """One independent replication; the run seed derives from (master, index)."""
    seed = derive_seed(cfg.master_seed, f"run-{run_idx}")
    sim = Simulation(cfg, seed)
    return summarize_run(sim.run())


def run_experiment(cfg: ScenarioConfig) -> ResultRow:
    """Execute all replications of one cell and aggregate."""
    summaries = [run_replication(cfg, i) for i in range(cfg.runs)]
    return ResultRow(
        protocol=cfg.protocol,
        scenario=cfg.scenario,
        setting=cfg.setting.name,
        profile=cfg.profile.name if cfg.profile else "off",
        s_size=cfg.s_size,
        runs=cfg.runs,
        sim_time=cfg.sim_time,
        report=aggregate(summaries),
    )


SUITES = ("competitiveness", "optimization", "scalability", "interactivity")


def suite_configs(
    name: str, sim_time: float, runs: int, master_seed: int
) -> list[ScenarioConfig]:
    """The experiment grid behind each named sweep."""
    common = dict(sim_time=sim_time, runs=runs, master_seed=master_seed)
    if name == "competitiveness":
        return [
            build_config(scenario=sc, setting="su1", profile="mi", protocol=proto, **common)
            for sc in ("all_media", "music", "tv", "movies")
            for proto in ("sisp", "eisp")
        ]
    if name == "optimization":
        return [
            build_config(scenario="movies", setting=su, profile="mi", protocol="eisp", **common)
            for su in ("su1", "su2", "su3")
        ]
    if name == "scalability":
        return [
            build_config(
                scenario="movies",
                setting="su1",
                profile="mi",
                protocol="eisp",
                s_size=n,
                **common,
            )
            for n in (25, 40, 50)
        ]
    if name == "interactivity":
        return [
            build_config(scenario="movies", setting="su1", profile=pf, protocol="eisp", **common)
            for pf in ("li", "mi", "hi")
        ]
    raise ValueError(f"unknown suite {name!r}")


def sweep(name: str, sim_time: float, runs: int, master_seed: int) -> list[ResultRow]:
    return [run_experiment(cfg) for cfg in suite_configs(name, sim_time, runs, master_seed)]


def write_plot_data(suite: str, rows: list[ResultRow], outdir: str) -> list[str]:
    """Columnar text files, one per figure-equivalent of the suite."""
    os.makedirs(outdir, exist_ok=True)
    paths: list[str] = []
    metrics = (
        ("rc", lambda r: (r.report.rc_mean, r.report.rc_ci)),
        ("ic", lambda r: (r.report.ic_mean, r.report.ic_ci)),
        ("rst", lambda r: (r.report.rst_mean, r.report.rst_ci)),
        ("cs", lambda r: (r.report.cs_mean, r.report.cs_ci)),
    )
    if suite == "competitiveness":
        scenarios = ("all_media", "music", "tv", "movies")
        by_key = {(r.scenario, r.protocol): r for r in rows}
        for mname, get in metrics:
            path = os.path.join(outdir, f"competitiveness_{mname}.dat")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(f"# scenario sisp_{mname} sisp_ci eisp_{mname} eisp_ci\n")
                for sc in scenarios:
                    sv, sc_ci = get(by_key[(sc, "sisp")])
                    ev, ec_ci = get(by_key[(sc, "eisp")])
                    fh.write(f"{sc} {_fmt(sv)} {_fmt(sc_ci)} {_fmt(ev)} {_fmt(ec_ci)}\n")
            paths.append(path)
    elif suite == "interactivity":
        for mname, get in metrics:
            path = os.path.join(outdir, f"interactivity_{mname}.dat")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(f"# profile {mname} ci\n")
                for r in rows:
                    val, ci = get(r)
                    fh.write(f"{r.profile} {_fmt(val)} {_fmt(ci)}\n")
            paths.append(path)
    elif suite in ("optimization", "scalability"):
        key = "setting" if suite == "optimization" else "s_size"
        path = os.path.join(outdir, f"{suite}_metrics.dat")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {key} rc rc_ci ic ic_ci rst rst_ci cs cs_ci\n")
            for r in rows:
                label = r.setting if suite == "optimization" else str(r.s_size)
                fields = []
                for _mname, get in metrics:
                    val, ci = get(r)
                    fields.append(f"{_fmt(val)} {_fmt(ci)}")
                fh.write(f"{label} {' '.join(fields)}\n")
        paths.append(path)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return paths
