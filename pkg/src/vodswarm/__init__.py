"""vodswarm: deterministic swarm simulator for interactive on-demand streaming."""

from .config import (
    PROFILES,
    PROTOCOLS,
    SCENARIOS,
    SETTINGS,
    Profile,
    ScenarioConfig,
    Setting,
    build_config,
    dump_config,
    load_config,
)
from .experiment import ResultRow, run_experiment, run_replication, sweep
from .metrics import MetricsReport, SessionRecord, aggregate, summarize_run
from .simulation import Simulation, SimulationFault

__version__ = "0.1.0"

__all__ = [
    "PROFILES",
    "PROTOCOLS",
    "SCENARIOS",
    "SETTINGS",
    "Profile",
    "ScenarioConfig",
    "Setting",
    "build_config",
    "dump_config",
    "load_config",
    "ResultRow",
    "run_experiment",
    "run_replication",
    "sweep",
    "MetricsReport",
    "SessionRecord",
    "aggregate",
    "summarize_run",
    "Simulation",
    "SimulationFault",
    "__version__",
]
