"""Seeded instantiation of the seven benchmark scenarios.

The robot always travels from (0, s_y_r) to (0, -s_y_r); with the default
s_y_r = -4 it moves 8 m in +y. Human placements are drawn from a scenario's
spawn construction with rejection sampling until all start positions respect
a clearance margin. Identical (kind, n_humans, s_y_r, seed) inputs yield
bit-identical specs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum

from .errors import InvalidInputError, ScenarioGenerationError
from .geometry import Vec2


class ScenarioKind(str, Enum):
    CIRCULAR_CROSSING = "circular_crossing"
    RANDOM = "random"
    PARALLEL_TRAFFIC = "parallel_traffic"
    PERPENDICULAR_TRAFFIC = "perpendicular_traffic"
    PASSING = "passing"
    OVERTAKING = "overtaking"
    CROSSING = "crossing"


MULTI_HUMAN_KINDS = frozenset({
    ScenarioKind.CIRCULAR_CROSSING,
    ScenarioKind.RANDOM,
    ScenarioKind.PARALLEL_TRAFFIC,
    ScenarioKind.PERPENDICULAR_TRAFFIC,
})
SINGLE_HUMAN_KINDS = frozenset({
    ScenarioKind.PASSING,
    ScenarioKind.OVERTAKING,
    ScenarioKind.CROSSING,
})

DEFAULT_S_Y_R = -4.0
DEFAULT_RADIUS = 0.2
DEFAULT_HUMAN_SPEED = 1.0
# The overtaken pedestrian walks slower than the robot so the robot
# actually catches up within the episode.
OVERTAKEN_HUMAN_SPEED = 0.5
# Jitter on ring starts/goals: breaks the measure-zero symmetric deadlocks
# that pure antipodes produce under reciprocal avoidance.
RING_JITTER = 0.5
# Spawn strips for the traffic scenarios: 6 m across the robot's path,
# 2 m along the crowd's travel direction.
STRIP_ACROSS = 6.0
STRIP_ALONG = 2.0
SPAWN_CLEARANCE = 0.1
MAX_PLACEMENT_ATTEMPTS = 1000


@dataclass(frozen=True, slots=True)
class HumanSpec:
    start: Vec2
    goal: Vec2
    preferred_speed: float
    radius: float


@dataclass(frozen=True, slots=True)
class ScenarioSpec:
    kind: ScenarioKind
    robot_start: Vec2
    robot_goal: Vec2
    humans: tuple[HumanSpec, ...] = field(default_factory=tuple)
    seed: int = 0
    robot_visible: bool = False

    @property
    def n_humans(self) -> int:
        return len(self.humans)


def _disc_jitter(rng: random.Random, radius: float) -> Vec2:
    r = radius * math.sqrt(rng.random())
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return Vec2(r * math.cos(theta), r * math.sin(theta))


def _clear_of(pos: Vec2, radius: float, placed: list[tuple[Vec2, float]]) -> bool:
    return all(pos.distance_to(p) >= radius + r + SPAWN_CLEARANCE for p, r in placed)


def sample_scenario(kind: ScenarioKind, n_humans: int = 5,
                    s_y_r: float = DEFAULT_S_Y_R, seed: int = 0, *,
                    human_radius: float = DEFAULT_RADIUS,
                    robot_radius: float = DEFAULT_RADIUS,
                    human_speed: float = DEFAULT_HUMAN_SPEED) -> ScenarioSpec:
    """Draw one fully instantiated scenario.

    Single-human kinds (passing, overtaking, crossing) always carry exactly
    one human regardless of n_humans. Raises ScenarioGenerationError when a
    human cannot be placed without overlap after MAX_PLACEMENT_ATTEMPTS.
    """
    kind = ScenarioKind(kind)
    if not math.isfinite(s_y_r) or s_y_r == 0.0:
        raise InvalidInputError(f"s_y_r must be finite and nonzero, got {s_y_r}")
    if n_humans < 1:
        raise InvalidInputError(f"n_humans must be >= 1, got {n_humans}")
    if kind in SINGLE_HUMAN_KINDS:
        n_humans = 1

    rng = random.Random(seed)
    half = abs(s_y_r)  # ring radius; half the robot's travel distance
    robot_start = Vec2(0.0, s_y_r)
    robot_goal = Vec2(0.0, -s_y_r)
    # Sign of the robot's travel direction along y (+1 with the default
    # s_y_r < 0): the single-human constructions are expressed relative to it.
    up = 1.0 if s_y_r < 0 else -1.0

    placed: list[tuple[Vec2, float]] = [(robot_start, robot_radius)]
    humans: list[HumanSpec] = []
    for _ in range(n_humans):
        for _attempt in range(MAX_PLACEMENT_ATTEMPTS):
            start, goal, speed = _draw_human(kind, rng, half, s_y_r, up,
                                             robot_radius, human_radius, human_speed)
            if _clear_of(start, human_radius, placed):
                placed.append((start, human_radius))
                humans.append(HumanSpec(start, goal, speed, human_radius))
                break
        else:
            raise ScenarioGenerationError(
                f"could not place human {len(humans)} in {kind.value} after "
                f"{MAX_PLACEMENT_ATTEMPTS} attempts (scene too crowded)")

    return ScenarioSpec(kind=kind, robot_start=robot_start, robot_goal=robot_goal,
                        humans=tuple(humans), seed=seed, robot_visible=False)


def _draw_human(kind: ScenarioKind, rng: random.Random, half: float, s_y_r: float,
                up: float, robot_radius: float, human_radius: float,
                human_speed: float) -> tuple[Vec2, Vec2, float]:
    if kind is ScenarioKind.CIRCULAR_CROSSING:
        ang = rng.uniform(0.0, 2.0 * math.pi)
        ring = Vec2(half * math.cos(ang), half * math.sin(ang))
        start = ring + _disc_jitter(rng, RING_JITTER)
        goal = -start + _disc_jitter(rng, RING_JITTER)
        return start, goal, human_speed

    if kind is ScenarioKind.RANDOM:
        # Square of side 50% larger than the robot's travel distance.
        hs = 1.5 * half
        start = Vec2(rng.uniform(-hs, hs), rng.uniform(-hs, hs))
        goal = Vec2(rng.uniform(-hs, hs), rng.uniform(-hs, hs))
        return start, goal, human_speed

    if kind is ScenarioKind.PARALLEL_TRAFFIC:
        side = rng.choice((-1.0, 1.0))
        ha = 0.5 * STRIP_ACROSS
        hl = 0.5 * STRIP_ALONG
        start = Vec2(rng.uniform(-ha, ha), side * half + rng.uniform(-hl, hl))
        goal = Vec2(rng.uniform(-ha, ha), -side * half + rng.uniform(-hl, hl))
        return start, goal, human_speed

    if kind is ScenarioKind.PERPENDICULAR_TRAFFIC:
        side = rng.choice((-1.0, 1.0))
        ha = 0.5 * STRIP_ACROSS
        hl = 0.5 * STRIP_ALONG
        start = Vec2(side * half + rng.uniform(-hl, hl), rng.uniform(-ha, ha))
        goal = Vec2(-side * half + rng.uniform(-hl, hl), rng.uniform(-ha, ha))
        return start, goal, human_speed

    x_band = robot_radius + human_radius
    if kind is ScenarioKind.PASSING:
        # Head-on: human starts on the robot's goal side and walks back.
        start = Vec2(rng.uniform(-x_band, x_band), -s_y_r)
        goal = Vec2(rng.uniform(-x_band, x_band), s_y_r)
        return start, goal, human_speed

    if kind is ScenarioKind.OVERTAKING:
        # Human ahead of the robot, same direction, slower.
        start = Vec2(rng.uniform(-x_band, x_band), s_y_r + up * rng.uniform(1.0, 2.5))
        goal = Vec2(rng.uniform(-x_band, x_band), -s_y_r + up * 1.0)
        return start, goal, OVERTAKEN_HUMAN_SPEED

    if kind is ScenarioKind.CROSSING:
        # Perpendicular single-human crossing through the robot's path.
        start = Vec2(s_y_r, rng.uniform(-x_band, x_band))
        goal = Vec2(-s_y_r, rng.uniform(-x_band, x_band))
        return start, goal, human_speed

    raise InvalidInputError(f"unknown scenario kind {kind!r}")
