"""Command-line driver: single cells, named sweeps, config dump/round-trip."""

from __future__ import annotations

import argparse
import sys

from .config import (
    PROFILES,
    PROTOCOLS,
    SCENARIOS,
    SETTINGS,
    build_config,
    dump_config,
    load_config_file,
    with_overrides,
)
from .experiment import CSV_HEADER, SUITES, run_experiment, sweep, write_plot_data
from .simulation import SimulationFault


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vodswarm",
        description="Swarm simulator for interactive on-demand streaming experiments.",
    )
    p.add_argument("--protocol", choices=PROTOCOLS)
    p.add_argument("--scenario", choices=sorted(SCENARIOS))
    p.add_argument("--setting", choices=sorted(SETTINGS))
    p.add_argument("--profile", choices=sorted(PROFILES) + ["off"])
    p.add_argument("--swarm-size", type=int, metavar="N")
    p.add_argument("--sim-time", type=float, metavar="SECONDS")
    p.add_argument("--runs", type=int, metavar="R")
    p.add_argument("--seed", type=int, metavar="U64")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--emit-plot-data", metavar="DIR")
    p.add_argument("--dump-config", action="store_true")
    return p


def resolve_config(args: argparse.Namespace):
    """Start from a file or presets, then apply explicit flag overrides."""
    if args.config:
        cfg = load_config_file(args.config)
        overrides = {}
        if args.swarm_size is not None:
            overrides["s_size"] = args.swarm_size
        if args.sim_time is not None:
            overrides["sim_time"] = args.sim_time
        if args.runs is not None:
            overrides["runs"] = args.runs
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.protocol is not None:
            overrides["protocol"] = args.protocol
        if args.setting is not None:
            overrides["setting"] = SETTINGS[args.setting]
        if args.profile is not None:
            overrides["profile"] = None if args.profile == "off" else PROFILES[args.profile]
        if args.scenario is not None:
            raise ValueError("--scenario cannot override --config; edit the file instead")
        return with_overrides(cfg, **overrides) if overrides else cfg
    return build_config(
        scenario=args.scenario or "movies",
        setting=args.setting or "su1",
        profile=args.profile if args.profile is not None else "mi",
        protocol=args.protocol or "eisp",
        s_size=args.swarm_size,
        sim_time=args.sim_time if args.sim_time is not None else 1.0e6,
        runs=args.runs if args.runs is not None else 10,
        master_seed=args.seed if args.seed is not None else 1,
    )


def _emit(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.suite:
            sim_time = args.sim_time if args.sim_time is not None else 1.0e6
            runs = args.runs if args.runs is not None else 10
            seed = args.seed if args.seed is not None else 1
            rows = sweep(args.suite, sim_time, runs, seed)
            _emit([CSV_HEADER] + [r.to_csv() for r in rows], args.out)
            if args.emit_plot_data:
                for path in write_plot_data(args.suite, rows, args.emit_plot_data):
                    print(f"wrote {path}", file=sys.stderr)
            return 0
        cfg = resolve_config(args)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return 0
        row = run_experiment(cfg)
        _emit([CSV_HEADER, row.to_csv()], args.out)
        return 0
    except SimulationFault as fault:
        print(f"error: {fault}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
