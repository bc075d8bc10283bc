"""Batch evaluation: episode scheduling, log persistence, report emission.

Per-episode seeds derive from the master seed by hashing, so (master seed,
config) fully determines every output byte; timestamps live in a separate
run_info.json so manifests, logs, and reports compare byte-identical across
reruns. Episodes run in a worker pool for built-in policies (results are
merged in episode-index order, so the worker count never changes output
bytes); bridge policies hold an exclusive session and run sequentially.

Each scenario kind gets an invisible-robot episode set (personal space,
projected path, jerk, speed, and side-preference metrics) plus, by default,
an independently seeded visible-robot set from which the aggregated-time
metric is taken.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from ._version import __version__
from .bridge import BridgePolicy
from .engine import SimConfig, run_episode
from .errors import PolicyConfigError
from .logio import dump_episode, load_episode
from .metrics import (AggregateReport, MetricConfig, MetricReport, aggregate,
                      attach_visible_m3, score_episode)
from .policies import BUILTIN_POLICY_NAMES, RobotPolicy, make_builtin_policy
from .scenarios import (MULTI_HUMAN_KINDS, ScenarioKind, sample_scenario)

INVISIBLE = "invisible"
VISIBLE = "visible"

DEFAULT_MULTI_EPISODES = 500
DEFAULT_SINGLE_EPISODES = 200


def default_episode_counts() -> dict[ScenarioKind, int]:
    return {kind: (DEFAULT_MULTI_EPISODES if kind in MULTI_HUMAN_KINDS
                   else DEFAULT_SINGLE_EPISODES)
            for kind in ScenarioKind}


@dataclass
class RunConfig:
    episodes: dict[ScenarioKind, int] = field(default_factory=default_episode_counts)
    n_humans: int = 5
    master_seed: int = 1
    s_y_r: float = -4.0
    policy: str = "goal_greedy"
    out_dir: Path = Path("crowdbench-out")
    sim: SimConfig = field(default_factory=SimConfig)
    metrics: MetricConfig = field(default_factory=MetricConfig)
    visible_set: bool = True
    workers: int = 0  # 0 = one per CPU

    def resolved_workers(self) -> int:
        if is_bridge_policy(self.policy):
            return 1
        if self.workers > 0:
            return self.workers
        return max(1, os.cpu_count() or 1)


@dataclass
class RunManifest:
    version: str
    config: dict
    seeds: dict[str, dict[str, list[int]]]
    outcomes: dict[str, dict[str, list[str]]]

    def to_json(self) -> str:
        return json.dumps({
            "version": self.version,
            "config": self.config,
            "seeds": self.seeds,
            "outcomes": self.outcomes,
        }, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        d = json.loads(text)
        return cls(d["version"], d["config"], d["seeds"], d["outcomes"])


def derive_seed(master_seed: int, kind: str, mode: str, index: int) -> int:
    """Deterministic 64-bit episode seed from the master seed."""
    key = f"{master_seed}|{kind}|{mode}|{index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def is_bridge_policy(policy: str) -> bool:
    return policy.startswith("cmd:") or policy.startswith("tcp:")


def make_policy(policy: str) -> RobotPolicy:
    """Resolve a policy string: a builtin name, "cmd:<client command>", or
    "tcp:<port>" / "tcp:<host>:<port>"."""
    if policy in BUILTIN_POLICY_NAMES:
        return make_builtin_policy(policy)
    if policy.startswith("cmd:"):
        command = policy[4:].strip()
        if not command:
            raise PolicyConfigError("cmd: policy requires a client command")
        return BridgePolicy(command=command)
    if policy.startswith("tcp:"):
        rest = policy[4:]
        if ":" in rest:
            host, port_s = rest.rsplit(":", 1)
        else:
            host, port_s = "127.0.0.1", rest
        try:
            port = int(port_s)
        except ValueError as exc:
            raise PolicyConfigError(f"bad tcp policy endpoint {policy!r}") from exc
        return BridgePolicy(tcp_port=port, tcp_host=host)
    raise PolicyConfigError(
        f"unknown policy {policy!r}; expected one of {BUILTIN_POLICY_NAMES}, "
        "cmd:<command>, or tcp:<port>")


def _config_to_dict(cfg: RunConfig) -> dict:
    from .logio import _config_dict  # same encoding as episode headers
    return {
        "episodes": {k.value: v for k, v in cfg.episodes.items()},
        "n_humans": cfg.n_humans,
        "master_seed": cfg.master_seed,
        "s_y_r": cfg.s_y_r,
        "policy": cfg.policy,
        "sim": _config_dict(cfg.sim),
        "metrics": {
            "epsilon": cfg.metrics.epsilon,
            "projection_horizon": cfg.metrics.projection_horizon,
            "speed_limit": cfg.metrics.speed_limit,
            "side_majority_vote": cfg.metrics.side_majority_vote,
        },
        "visible_set": cfg.visible_set,
    }


def config_from_dict(d: dict) -> RunConfig:
    from .logio import _config_from_dict
    cfg = RunConfig()
    if "episodes" in d:
        cfg.episodes = {ScenarioKind(k): int(v) for k, v in d["episodes"].items()}
    for key in ("n_humans", "master_seed", "s_y_r", "policy", "visible_set", "workers"):
        if key in d:
            setattr(cfg, key, d[key])
    if "sim" in d:
        cfg.sim = _config_from_dict(d["sim"])
    if "metrics" in d:
        cfg.metrics = MetricConfig(**d["metrics"])
    if "out_dir" in d:
        cfg.out_dir = Path(d["out_dir"])
    return cfg


# One episode job: everything a worker needs, picklable.
_Job = tuple[str, str, int, int, float, str, SimConfig, MetricConfig]


def _run_job(job: _Job) -> tuple[str, MetricReport]:
    kind, mode, seed, n_humans, s_y_r, policy_str, sim, metric_cfg = job
    spec = sample_scenario(ScenarioKind(kind), n_humans, s_y_r, seed,
                           human_radius=sim.robot_radius,
                           robot_radius=sim.robot_radius)
    config = replace(sim, robot_visible=(mode == VISIBLE))
    policy = make_builtin_policy(policy_str)
    log = run_episode(spec, policy, config)
    return dump_episode(log), score_episode(log, metric_cfg)


def _run_job_with(policy: RobotPolicy, job: _Job) -> tuple[str, MetricReport]:
    kind, mode, seed, n_humans, s_y_r, _policy_str, sim, metric_cfg = job
    spec = sample_scenario(ScenarioKind(kind), n_humans, s_y_r, seed,
                           human_radius=sim.robot_radius,
                           robot_radius=sim.robot_radius)
    config = replace(sim, robot_visible=(mode == VISIBLE))
    log = run_episode(spec, policy, config)
    return dump_episode(log), score_episode(log, metric_cfg)


def _episode_path(out_dir: Path, kind: str, mode: str, index: int) -> Path:
    return out_dir / "logs" / kind / mode / f"ep-{index:05d}.jsonl"


def run_suite(cfg: RunConfig) -> tuple[RunManifest, dict[str, AggregateReport]]:
    """Run the configured benchmark and write logs, manifest, and reports."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.now(timezone.utc).isoformat()

    kinds = [k for k in ScenarioKind if k in cfg.episodes]
    modes = [INVISIBLE] + ([VISIBLE] if cfg.visible_set else [])
    jobs: list[_Job] = []
    index_of: list[tuple[str, str, int]] = []
    for kind in kinds:
        for mode in modes:
            for i in range(cfg.episodes[kind]):
                seed = derive_seed(cfg.master_seed, kind.value, mode, i)
                jobs.append((kind.value, mode, seed, cfg.n_humans, cfg.s_y_r,
                             cfg.policy, cfg.sim, cfg.metrics))
                index_of.append((kind.value, mode, i))

    if is_bridge_policy(cfg.policy):
        policy = make_policy(cfg.policy)
        try:
            results = [_run_job_with(policy, job) for job in jobs]
        finally:
            policy.close()
    elif cfg.resolved_workers() == 1 or len(jobs) <= 2:
        results = [_run_job(job) for job in jobs]
    else:
        workers = cfg.resolved_workers()
        chunk = max(1, len(jobs) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs, chunksize=chunk))

    reports: dict[str, dict[str, list[MetricReport]]] = {
        k.value: {m: [] for m in modes} for k in kinds}
    seeds: dict[str, dict[str, list[int]]] = {
        k.value: {m: [] for m in modes} for k in kinds}
    outcomes: dict[str, dict[str, list[str]]] = {
        k.value: {m: [] for m in modes} for k in kinds}
    for (kind, mode, i), job, (log_text, report) in zip(index_of, jobs, results):
        path = _episode_path(out_dir, kind, mode, i)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(log_text, encoding="utf-8")
        reports[kind][mode].append(report)
        seeds[kind][mode].append(job[2])
        outcomes[kind][mode].append(report.outcome)

    aggregates = _aggregate_suite(reports, cfg.visible_set)
    manifest = RunManifest(version=__version__, config=_config_to_dict(cfg),
                           seeds=seeds, outcomes=outcomes)
    _write_outputs(out_dir, manifest, aggregates)
    (out_dir / "run_info.json").write_text(json.dumps({
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
    }, indent=2) + "\n", encoding="utf-8")
    return manifest, aggregates


def _aggregate_suite(reports: dict[str, dict[str, list[MetricReport]]],
                     visible_set: bool) -> dict[str, AggregateReport]:
    aggregates: dict[str, AggregateReport] = {}
    for kind, by_mode in reports.items():
        agg = aggregate(by_mode[INVISIBLE])
        if visible_set and by_mode.get(VISIBLE):
            agg = attach_visible_m3(agg, aggregate(by_mode[VISIBLE]))
        aggregates[kind] = agg
    return aggregates


def _write_outputs(out_dir: Path, manifest: RunManifest,
                   aggregates: dict[str, AggregateReport]) -> None:
    from .report import emit_report
    (out_dir / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    for fmt, filename in (("markdown", "report.md"), ("csv", "report.csv"),
                          ("json", "report.json")):
        (out_dir / filename).write_text(emit_report(aggregates, fmt), encoding="utf-8")


def rescore_run(run_dir: str | Path, out_dir: str | Path | None = None
                ) -> dict[str, AggregateReport]:
    """Re-score the persisted logs of a previous run from disk.

    Reads the manifest for the metric configuration and episode layout,
    loads every log, recomputes all metrics offline, and (optionally)
    re-emits the report files into out_dir. Values must reproduce the
    original run exactly.
    """
    run_dir = Path(run_dir)
    manifest = RunManifest.from_json((run_dir / "manifest.json").read_text(encoding="utf-8"))
    metric_cfg = MetricConfig(**manifest.config["metrics"])
    visible_set = manifest.config["visible_set"]

    reports: dict[str, dict[str, list[MetricReport]]] = {}
    for kind, by_mode in manifest.seeds.items():
        reports[kind] = {}
        for mode, seed_list in by_mode.items():
            reports[kind][mode] = []
            for i in range(len(seed_list)):
                log = load_episode(_episode_path(run_dir, kind, mode, i))
                reports[kind][mode].append(score_episode(log, metric_cfg))

    aggregates = _aggregate_suite(reports, visible_set)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        from .report import emit_report
        for fmt, filename in (("markdown", "report.md"), ("csv", "report.csv"),
                              ("json", "report.json")):
            (out / filename).write_text(emit_report(aggregates, fmt), encoding="utf-8")
    return aggregates
