"""Command-line front end.

    birdflock run --scenario leaderless3 --law proposed --out out/
    birdflock compare --scenario leader_follower2 --set scenario.preset=realistic

Exit status: 0 when every run stayed inside the distance bounds, 2 when any
run breached them, 64 on a configuration error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .dynamics import run
from .io import (
    RunSummary,
    write_avg_distance_csv,
    write_diagnostics_csv,
    write_json,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_CONFIG = 64


def execute(config: RunConfig) -> list[RunSummary]:
    """Run every law of ``config`` and write its output tree.

    Per law: ``<out>/<law>/trajectory.csv``, ``diagnostics.csv`` and
    ``summary.json``. At the top: ``config.txt``, ``summary.json`` and, for
    comparisons, ``avg_distance.csv``.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    trajectories = {}
    summaries = []
    for law in config.laws:
        trajectory = run(config.scenario_spec(law))
        trajectories[law.value] = trajectory
        summary = RunSummary.from_trajectory(trajectory, config.convergence_threshold)
        summaries.append(summary)
        law_dir = out / law.value
        law_dir.mkdir(exist_ok=True)
        write_trajectory_csv(trajectory, law_dir / "trajectory.csv")
        write_diagnostics_csv(trajectory.diagnostics, law_dir / "diagnostics.csv")
        write_json(summary.to_dict(), law_dir / "summary.json")

    (out / "config.txt").write_text("".join(f"{k} = {v}\n" for k, v in config.as_pairs()))
    if config.compare:
        write_avg_distance_csv(trajectories, config.params.d0, config.params.d1,
                               out / "avg_distance.csv")
    write_json({"scenario": config.scenario, "runs": [s.to_dict() for s in summaries]},
               out / "summary.json")
    return summaries


def exit_code(summaries) -> int:
    return EXIT_VIOLATION if any(s.violation is not None for s in summaries) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="birdflock", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("run", "simulate one control law"),
                            ("compare", "simulate all four laws on the same initial state")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scenario", choices=("leaderless3", "leader_follower2", "custom"))
        if name == "run":
            p.add_argument("--law", help="proposed, model1, model2, model3 or all")
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override one configuration key (repeatable)")
        p.add_argument("--dt", type=float)
        p.add_argument("--duration", type=float)
        p.add_argument("--out", type=Path, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    law = "all" if args.command == "compare" else args.law
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            config = load_config(args.config, args.overrides, scenario=args.scenario, law=law,
                                 dt=args.dt, duration=args.duration, out=args.out)
        except ConfigError as exc:
            print(f"birdflock: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    for w in caught:
        print(f"birdflock: warning: {w.message}", file=sys.stderr)

    summaries = execute(config)
    for s in summaries:
        status = "ok" if s.violation is None else (
            f"{s.violation.bound} bound breached at t={s.violation.time:g}"
            + ("" if s.completed else " (halted)"))
        conv = "-" if s.convergence_time is None else f"{s.convergence_time:g} s"
        print(f"{s.law:9s} {status:40s} converged: {conv:10s} "
              f"avg distance {s.min_avg_distance:.4f}..{s.max_avg_distance:.4f} m")
    print(f"output written to {config.output_dir}")
    return exit_code(summaries)


if __name__ == "__main__":
    sys.exit(main())
