"""Agent state and shared kinematic helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInputError
from .geometry import Vec2

ROBOT = "robot"
HUMAN = "human"


@dataclass(slots=True)
class AgentState:
    """Kinematic snapshot of one agent.

    Positions and goals in meters, velocities in m/s. `kind` is "robot" or
    "human"; agent ids are unique within an episode (robot is id 0).
    """

    id: int
    position: Vec2
    velocity: Vec2
    radius: float
    goal: Vec2
    preferred_speed: float
    kind: str

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise InvalidInputError(f"agent radius must be > 0, got {self.radius}")
        if self.preferred_speed <= 0.0:
            raise InvalidInputError(f"preferred_speed must be > 0, got {self.preferred_speed}")

    def copy(self) -> "AgentState":
        return AgentState(self.id, self.position, self.velocity, self.radius,
                          self.goal, self.preferred_speed, self.kind)

    def at_goal(self, tolerance: float | None = None) -> bool:
        tol = self.radius if tolerance is None else tolerance
        return self.position.distance_to(self.goal) < tol


@dataclass(frozen=True, slots=True)
class OrcaParams:
    """Tuning of the reciprocal-avoidance solver (CrowdSim-compatible defaults)."""

    neighbor_dist: float = 10.0
    time_horizon_agents: float = 5.0
    max_speed: float = 1.0
    max_neighbors: int = 10

    def __post_init__(self) -> None:
        for name in ("neighbor_dist", "time_horizon_agents", "max_speed", "max_neighbors"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"OrcaParams.{name} must be strictly positive")


@dataclass(frozen=True, slots=True)
class PolicyAction:
    """A robot policy's command for one step."""

    command_velocity: Vec2


def preferred_velocity(state: AgentState, dt: float) -> Vec2:
    """Velocity toward the goal at preferred speed, clipped to avoid
    overshooting the goal within one dt."""
    if dt <= 0.0 or not math.isfinite(dt):
        raise InvalidInputError(f"dt must be > 0, got {dt}")
    to_goal = state.goal - state.position
    dist = to_goal.norm()
    if dist < 1e-12:
        return Vec2(0.0, 0.0)
    speed = min(state.preferred_speed, dist / dt)
    return Vec2(to_goal.x / dist * speed, to_goal.y / dist * speed)


def clamp_speed(vx: float, vy: float, limit: float) -> tuple[float, float]:
    """Scale (vx, vy) so its norm never exceeds `limit`.

    One rescale can leave the norm a few ulp high, so iterate (bounded).
    """
    for _ in range(4):
        n = math.hypot(vx, vy)
        if n <= limit or n == 0.0:
            break
        s = limit / n
        vx *= s
        vy *= s
    return vx, vy
