"""Built-in robot policies and the policy interface the engine drives.

A policy is an object with an `act` method; `begin_episode`/`end_episode`
hooks exist for stateful policies (the external-process bridge uses them to
frame its protocol). Built-in policies are pure functions of the observed
states.
"""

from __future__ import annotations

from typing import Sequence

from .agents import AgentState, OrcaParams, PolicyAction, preferred_velocity
from .errors import PolicyConfigError
from .geometry import Vec2
from .orca import orca_velocity

BUILTIN_POLICY_NAMES = ("goal_greedy", "orca", "stationary")


class RobotPolicy:
    """Base class; subclasses override act()."""

    name = "base"

    def begin_episode(self, spec, config) -> None:  # noqa: ARG002 - hooks
        pass

    def act(self, robot: AgentState, humans: Sequence[AgentState],
            step: int, time_remaining: float, dt: float) -> Vec2:
        raise NotImplementedError

    def end_episode(self, outcome: str) -> None:  # noqa: ARG002
        pass

    def close(self) -> None:
        pass


class GoalGreedyPolicy(RobotPolicy):
    """Straight to goal at preferred speed, ignoring everyone."""

    name = "goal_greedy"

    def act(self, robot, humans, step, time_remaining, dt):
        return preferred_velocity(robot, dt)


class OrcaPolicy(RobotPolicy):
    """Robot runs the same reciprocal-avoidance solver as the pedestrians."""

    name = "orca"

    def __init__(self, params: OrcaParams | None = None):
        self._params = params

    def begin_episode(self, spec, config) -> None:
        if self._params is None:
            self._params = config.orca

    def act(self, robot, humans, step, time_remaining, dt):
        params = self._params if self._params is not None else OrcaParams()
        return orca_velocity(robot, humans, params, dt)


class StationaryPolicy(RobotPolicy):
    """Never moves; useful for invisibility-contract checks."""

    name = "stationary"

    def act(self, robot, humans, step, time_remaining, dt):
        return Vec2(0.0, 0.0)


def make_builtin_policy(name: str, params: OrcaParams | None = None) -> RobotPolicy:
    if name == "goal_greedy":
        return GoalGreedyPolicy()
    if name == "orca":
        return OrcaPolicy(params)
    if name == "stationary":
        return StationaryPolicy()
    raise PolicyConfigError(f"unknown builtin policy {name!r}; expected one of {BUILTIN_POLICY_NAMES}")


def builtin_policy(name: str, state: AgentState, visible_others: Sequence[AgentState],
                   params: OrcaParams, dt: float) -> PolicyAction:
    """One-shot functional form of the built-in policies."""
    if name == "goal_greedy":
        return PolicyAction(preferred_velocity(state, dt))
    if name == "orca":
        return PolicyAction(orca_velocity(state, visible_others, params, dt))
    if name == "stationary":
        return PolicyAction(Vec2(0.0, 0.0))
    raise PolicyConfigError(f"unknown builtin policy {name!r}; expected one of {BUILTIN_POLICY_NAMES}")
