"""Session-scoped bank of experiment cells shared across acceptance checks."""

from dataclasses import dataclass, field

import pytest

from vodswarm.config import ScenarioConfig, build_config
from vodswarm.engine import derive_seed
from vodswarm.metrics import MetricsReport, SessionRecord, aggregate, summarize_run
from vodswarm.simulation import Simulation

RUNS = 10
MASTER_SEED = 1
DESK_TIME = 1.0e5

VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    """Replay acceptance verdict lines uncaptured at the end of the run."""
    if VERDICTS:
        terminalreporter.write_sep("=", "acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)


@dataclass
class CellResult:
    """Aggregated report plus raw per-run material for one experiment cell."""

    cfg: ScenarioConfig
    report: MetricsReport
    run_records: list[list[SessionRecord]]
    action_counts: list[dict[str, int]] = field(default_factory=list)
    gap_samples: list[list[float]] = field(default_factory=list)


def compute_cell(cfg: ScenarioConfig) -> CellResult:
    collect = cfg.sim_time <= DESK_TIME and cfg.profile is not None
    run_records, counts, gaps = [], [], []
    for i in range(cfg.runs):
        seed = derive_seed(cfg.master_seed, f"run-{i}")
        sim = Simulation(cfg, seed, collect_behavior_stats=collect)
        run_records.append(sim.run())
        if collect:
            counts.append(sim.action_counts)
            gaps.append(sim.gap_samples)
    report = aggregate([summarize_run(r) for r in run_records])
    return CellResult(cfg, report, run_records, counts, gaps)


class CellBank:
    """Lazy cache: each distinct cell is simulated once per test session."""

    def __init__(self) -> None:
        self.cache: dict[tuple, CellResult] = {}

    def get(
        self,
        scenario: str = "movies",
        setting: str = "su1",
        profile: str | None = "mi",
        protocol: str = "eisp",
        s_size: int | None = None,
        sim_time: float = DESK_TIME,
    ) -> CellResult:
        key = (scenario, setting, profile, protocol, s_size, sim_time)
        if key not in self.cache:
            cfg = build_config(
                scenario,
                setting,
                profile,
                protocol,
                s_size=s_size,
                sim_time=sim_time,
                runs=RUNS,
                master_seed=MASTER_SEED,
            )
            self.cache[key] = compute_cell(cfg)
        return self.cache[key]


@pytest.fixture(scope="session")
def cells() -> CellBank:
    return CellBank()
