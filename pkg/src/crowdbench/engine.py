"""Fixed-timestep episode execution.

Each step: the robot policy commands a velocity (clipped to its max speed),
every human computes a reciprocal-avoidance velocity over its neighbors
(other humans, plus the robot iff the robot is visible), then all agents
integrate simultaneously. Termination is checked after integration in the
order collision > success > timeout. Episodes are strictly sequential and
deterministic; distinct episodes are independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .agents import HUMAN, ROBOT, AgentState, OrcaParams, clamp_speed
from .errors import InvalidInputError, PolicyAborted
from .geometry import Vec2
from .orca import orca_velocity
from .policies import RobotPolicy
from .scenarios import ScenarioSpec

SUCCESS = "success"
COLLISION = "collision"
TIMEOUT = "timeout"
ABORTED = "aborted"
OUTCOMES = (SUCCESS, COLLISION, TIMEOUT, ABORTED)


@dataclass(frozen=True, slots=True)
class SimConfig:
    dt: float = 0.25
    time_limit: float = 25.0
    goal_tolerance: float = 0.2
    robot_visible: bool = False
    robot_radius: float = 0.2
    robot_pref_speed: float = 1.0
    orca: OrcaParams = field(default_factory=OrcaParams)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise InvalidInputError(f"dt must be > 0, got {self.dt}")
        if not (math.isfinite(self.time_limit) and self.time_limit > self.dt):
            raise InvalidInputError("time_limit must exceed dt")
        if self.goal_tolerance <= 0.0:
            raise InvalidInputError("goal_tolerance must be > 0")


@dataclass(slots=True)
class EpisodeLog:
    """Replayable record of one episode; the sole input to every metric.

    frames[k] holds the per-agent states after k integration steps (robot
    first, then humans in spec order); frame 0 is the initial scene.
    human_nav_times holds the first time each human reached its goal, or the
    episode end time if it never did.
    """

    spec: ScenarioSpec
    config: SimConfig
    dt: float
    frames: list[list[AgentState]]
    outcome: str
    robot_nav_time: float
    human_nav_times: list[float]
    human_collision_steps: list[int] = field(default_factory=list)
    clipped_steps: list[int] = field(default_factory=list)
    abort_reason: str | None = None

    @property
    def total_time(self) -> float:
        """Normalization constant for the duration metrics: frame count * dt."""
        return len(self.frames) * self.dt

    @property
    def duration(self) -> float:
        """Simulated time elapsed between the first and last frame."""
        return (len(self.frames) - 1) * self.dt

    @property
    def n_humans(self) -> int:
        return len(self.spec.humans)

    def robot_states(self) -> list[AgentState]:
        return [f[0] for f in self.frames]

    def human_states(self, index: int) -> list[AgentState]:
        return [f[1 + index] for f in self.frames]


def _snapshot(agents: list[AgentState]) -> list[AgentState]:
    return [a.copy() for a in agents]


def run_episode(spec: ScenarioSpec, policy: RobotPolicy, config: SimConfig) -> EpisodeLog:
    """Run one episode to termination and return its log.

    A PolicyAborted raised by the policy yields an "aborted" outcome rather
    than propagating; aborted logs are excluded from metric aggregation.
    """
    dt = config.dt
    spec = replace(spec, robot_visible=config.robot_visible)

    robot = AgentState(0, spec.robot_start, Vec2(0.0, 0.0), config.robot_radius,
                       spec.robot_goal, config.robot_pref_speed, ROBOT)
    humans = [AgentState(i + 1, h.start, Vec2(0.0, 0.0), h.radius, h.goal,
                         h.preferred_speed, HUMAN)
              for i, h in enumerate(spec.humans)]
    # Humans cap their speed at their own preferred walking speed.
    human_params = [replace(config.orca, max_speed=h.preferred_speed)
                    for h in spec.humans]

    frames = [_snapshot([robot] + humans)]
    human_nav: list[float | None] = [None] * len(humans)
    human_collision_steps: list[int] = []
    clipped_steps: list[int] = []
    abort_reason: str | None = None
    outcome = TIMEOUT
    robot_nav_time: float | None = None

    max_steps = int(math.floor(config.time_limit / dt + 1e-9))
    policy.begin_episode(spec, config)
    for step in range(1, max_steps + 1):
        time_remaining = config.time_limit - (step - 1) * dt
        try:
            cmd = policy.act(robot, humans, step - 1, time_remaining, dt)
        except PolicyAborted as exc:
            outcome = ABORTED
            abort_reason = exc.reason
            break
        vx, vy = cmd.x, cmd.y
        if math.hypot(vx, vy) > config.orca.max_speed:
            vx, vy = clamp_speed(vx, vy, config.orca.max_speed)
            clipped_steps.append(step - 1)

        new_velocities = [Vec2(vx, vy)]
        for i, h in enumerate(humans):
            neighbors = [o for o in humans if o is not h]
            if config.robot_visible:
                neighbors.append(robot)
            new_velocities.append(orca_velocity(h, neighbors, human_params[i], dt))

        # All agents commit velocities before any position moves.
        for agent, vel in zip([robot] + humans, new_velocities):
            agent.velocity = vel
            agent.position = agent.position + vel * dt
        frames.append(_snapshot([robot] + humans))

        for i, h in enumerate(humans):
            if human_nav[i] is None and h.position.distance_to(h.goal) < h.radius:
                human_nav[i] = step * dt
        if any(humans[i].position.distance_to(humans[j].position)
               < humans[i].radius + humans[j].radius
               for i in range(len(humans)) for j in range(i + 1, len(humans))):
            human_collision_steps.append(step)

        if any(robot.position.distance_to(h.position) < robot.radius + h.radius
               for h in humans):
            outcome = COLLISION
            break
        if robot.position.distance_to(robot.goal) < config.goal_tolerance:
            outcome = SUCCESS
            robot_nav_time = step * dt
            break
    policy.end_episode(outcome)

    end_time = (len(frames) - 1) * dt
    return EpisodeLog(
        spec=spec,
        config=config,
        dt=dt,
        frames=frames,
        outcome=outcome,
        robot_nav_time=robot_nav_time if robot_nav_time is not None else end_time,
        human_nav_times=[t if t is not None else end_time for t in human_nav],
        human_collision_steps=human_collision_steps,
        clipped_steps=clipped_steps,
        abort_reason=abort_reason,
    )
