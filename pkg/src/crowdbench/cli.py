"""Command-line front end.

    crowdbench run    --out DIR [--seed N] [--scenario KIND ...]
                      [--episodes N] [--policy NAME|cmd:...|tcp:PORT]
                      [--config FILE] [--n-humans N] [--workers N]
                      [--invisible-only] [--epsilon F]
    crowdbench score  --run DIR [--out DIR]
    crowdbench render LOG --out FILE.svg [--epsilon F]

Flags override their config-file counterparts. Exit status 0 on a clean
run, 4 when episodes aborted (their count is excluded from statistics and
printed in the summary), 2 on bad usage or I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .logio import load_episode
from .metrics import MetricConfig
from .render import render_trajectory
from .runner import (RunConfig, config_from_dict, default_episode_counts,
                     run_suite, rescore_run)
from .scenarios import ScenarioKind

_KIND_NAMES = [k.value for k in ScenarioKind]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crowdbench",
        description="Deterministic crowd-navigation benchmark runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark suite")
    run.add_argument("--config", type=Path, default=None,
                     help="JSON config file; flags override its values")
    run.add_argument("--seed", type=int, default=None, help="master seed")
    run.add_argument("--scenario", action="append", choices=_KIND_NAMES + ["all"],
                     default=None, help="scenario kind (repeatable; default all)")
    run.add_argument("--episodes", type=int, default=None,
                     help="episode count per selected scenario (default 500 "
                          "multi-human / 200 single-human)")
    run.add_argument("--n-humans", type=int, default=None)
    run.add_argument("--policy", default=None,
                     help="goal_greedy | orca | stationary | cmd:<client command> "
                          "| tcp:<port>")
    run.add_argument("--out", type=Path, default=None,
                     help="output directory (default crowdbench-out)")
    run.add_argument("--workers", type=int, default=None)
    run.add_argument("--invisible-only", action="store_true",
                     help="skip the visible-robot episode set (no aggregated-time metric)")
    run.add_argument("--epsilon", type=float, default=None,
                     help="personal-space threshold in meters")

    score = sub.add_parser("score", help="re-score the persisted logs of a run")
    score.add_argument("--run", type=Path, required=True, help="run directory")
    score.add_argument("--out", type=Path, default=None,
                       help="directory for re-emitted reports")

    render = sub.add_parser("render", help="render an episode log to SVG")
    render.add_argument("log", type=Path)
    render.add_argument("--out", type=Path, required=True)
    render.add_argument("--epsilon", type=float, default=None)
    return parser


def _run_config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        cfg = config_from_dict(json.loads(args.config.read_text(encoding="utf-8")))
    else:
        cfg = RunConfig()

    if args.scenario and "all" not in args.scenario:
        selected = [ScenarioKind(s) for s in dict.fromkeys(args.scenario)]
        defaults = default_episode_counts()
        cfg.episodes = {k: defaults[k] for k in selected}
    if args.episodes is not None:
        cfg.episodes = {k: args.episodes for k in cfg.episodes}
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.n_humans is not None:
        cfg.n_humans = args.n_humans
    if args.policy is not None:
        cfg.policy = args.policy
    if args.workers is not None:
        cfg.workers = args.workers
    if args.invisible_only:
        cfg.visible_set = False
    if args.epsilon is not None:
        cfg.metrics = replace(cfg.metrics, epsilon=args.epsilon)
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "run":
        cfg = _run_config_from_args(args)
        try:
            manifest, aggregates = run_suite(cfg)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        total = sum(len(s) for by_mode in manifest.seeds.values()
                    for s in by_mode.values())
        aborted = sum(a.aborted for a in aggregates.values())
        print(f"ran {total} episodes over {len(aggregates)} scenario kind(s) "
              f"-> {cfg.out_dir}")
        for kind, agg in aggregates.items():
            print(f"  {kind}: success {agg.success_pct:.1f}% "
                  f"collision {agg.collision_pct:.1f}% timeout {agg.timeout_pct:.1f}%")
        if aborted:
            print(f"  aborted episodes excluded from statistics: {aborted}")
            return 4
        return 0

    if args.command == "score":
        aggregates = rescore_run(args.run, args.out)
        for kind, agg in aggregates.items():
            print(f"{kind}: {agg.episodes} episodes, success {agg.success_pct:.1f}%")
        return 0

    if args.command == "render":
        log = load_episode(args.log)
        cfg = MetricConfig(epsilon=args.epsilon) if args.epsilon else None
        render_trajectory(log, args.out, cfg)
        print(f"wrote {args.out}")
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
