"""Episode log serialization: one JSONL document per episode.

Line 1 is a header carrying the scenario and simulation config, followed by
one line per frame (step index plus [px, py, vx, vy] per agent, robot
first), and a final outcome record. Floats are written with full round-trip
precision, so serialize -> parse -> serialize is byte-stable and metrics
computed from a reloaded log equal those from the in-memory log.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

from .agents import HUMAN, ROBOT, AgentState, OrcaParams
from .engine import EpisodeLog, SimConfig
from .geometry import Vec2
from .scenarios import HumanSpec, ScenarioKind, ScenarioSpec

FORMAT_NAME = "crowdbench-episode"
FORMAT_VERSION = 1


def _spec_dict(spec: ScenarioSpec) -> dict:
    return {
        "kind": spec.kind.value,
        "seed": spec.seed,
        "robot_visible": spec.robot_visible,
        "robot_start": [spec.robot_start.x, spec.robot_start.y],
        "robot_goal": [spec.robot_goal.x, spec.robot_goal.y],
        "humans": [
            {
                "start": [h.start.x, h.start.y],
                "goal": [h.goal.x, h.goal.y],
                "preferred_speed": h.preferred_speed,
                "radius": h.radius,
            }
            for h in spec.humans
        ],
    }


def _spec_from_dict(d: dict) -> ScenarioSpec:
    return ScenarioSpec(
        kind=ScenarioKind(d["kind"]),
        robot_start=Vec2(*d["robot_start"]),
        robot_goal=Vec2(*d["robot_goal"]),
        humans=tuple(
            HumanSpec(Vec2(*h["start"]), Vec2(*h["goal"]),
                      h["preferred_speed"], h["radius"])
            for h in d["humans"]
        ),
        seed=d["seed"],
        robot_visible=d["robot_visible"],
    )


def _config_dict(config: SimConfig) -> dict:
    return {
        "dt": config.dt,
        "time_limit": config.time_limit,
        "goal_tolerance": config.goal_tolerance,
        "robot_visible": config.robot_visible,
        "robot_radius": config.robot_radius,
        "robot_pref_speed": config.robot_pref_speed,
        "orca": {
            "neighbor_dist": config.orca.neighbor_dist,
            "time_horizon_agents": config.orca.time_horizon_agents,
            "max_speed": config.orca.max_speed,
            "max_neighbors": config.orca.max_neighbors,
        },
    }


def _config_from_dict(d: dict) -> SimConfig:
    return SimConfig(
        dt=d["dt"],
        time_limit=d["time_limit"],
        goal_tolerance=d["goal_tolerance"],
        robot_visible=d["robot_visible"],
        robot_radius=d["robot_radius"],
        robot_pref_speed=d["robot_pref_speed"],
        orca=OrcaParams(**d["orca"]),
    )


def dump_episode(log: EpisodeLog) -> str:
    """Serialize a log to its JSONL text."""
    lines = [json.dumps({
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "spec": _spec_dict(log.spec),
        "config": _config_dict(log.config),
    }, separators=(",", ":"))]
    for step, frame in enumerate(log.frames):
        agents = [[a.position.x, a.position.y, a.velocity.x, a.velocity.y]
                  for a in frame]
        lines.append(json.dumps({"step": step, "agents": agents},
                                separators=(",", ":")))
    lines.append(json.dumps({
        "outcome": log.outcome,
        "robot_nav_time": log.robot_nav_time,
        "human_nav_times": log.human_nav_times,
        "human_collision_steps": log.human_collision_steps,
        "clipped_steps": log.clipped_steps,
        "abort_reason": log.abort_reason,
    }, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def write_episode(log: EpisodeLog, path: str | Path) -> None:
    Path(path).write_text(dump_episode(log), encoding="utf-8")


def _iter_records(text: str) -> Iterator[dict]:
    for line in text.splitlines():
        if line.strip():
            yield json.loads(line)


def parse_episode(text: str) -> EpisodeLog:
    records = _iter_records(text)
    header = next(records)
    if header.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    spec = _spec_from_dict(header["spec"])
    config = _config_from_dict(header["config"])

    frames: list[list[AgentState]] = []
    outcome_rec: dict | None = None
    for rec in records:
        if "outcome" in rec:
            outcome_rec = rec
            break
        frame: list[AgentState] = []
        for idx, (px, py, vx, vy) in enumerate(rec["agents"]):
            if idx == 0:
                frame.append(AgentState(0, Vec2(px, py), Vec2(vx, vy),
                                        config.robot_radius, spec.robot_goal,
                                        config.robot_pref_speed, ROBOT))
            else:
                h = spec.humans[idx - 1]
                frame.append(AgentState(idx, Vec2(px, py), Vec2(vx, vy),
                                        h.radius, h.goal, h.preferred_speed, HUMAN))
        frames.append(frame)
    if outcome_rec is None:
        raise ValueError("episode log truncated: missing outcome record")

    return EpisodeLog(
        spec=spec,
        config=config,
        dt=config.dt,
        frames=frames,
        outcome=outcome_rec["outcome"],
        robot_nav_time=outcome_rec["robot_nav_time"],
        human_nav_times=list(outcome_rec["human_nav_times"]),
        human_collision_steps=list(outcome_rec["human_collision_steps"]),
        clipped_steps=list(outcome_rec["clipped_steps"]),
        abort_reason=outcome_rec["abort_reason"],
    )


def load_episode(path: str | Path) -> EpisodeLog:
    return parse_episode(Path(path).read_text(encoding="utf-8"))
