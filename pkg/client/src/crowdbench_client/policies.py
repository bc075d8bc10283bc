"""Policies shipped with the reference client."""

from __future__ import annotations

import math

from .client import NegotiatedConfig, Observation


def goal_greedy(obs: Observation, config: NegotiatedConfig) -> tuple[float, float]:
    """Straight toward the goal at the negotiated preferred speed, slowing on
    the final step so the goal is never overshot within one dt.

    Arithmetic matches the benchmark's built-in goal-greedy policy operation
    for operation, so a run through this client reproduces the built-in
    run's trajectories bit for bit.
    """
    dx = obs.goal_x - obs.robot.px
    dy = obs.goal_y - obs.robot.py
    dist = math.hypot(dx, dy)
    if dist < 1e-12:
        return 0.0, 0.0
    speed = min(config.preferred_speed, dist / obs.dt)
    return dx / dist * speed, dy / dist * speed


class LearnedPolicyAdapter:
    """Skeleton for dropping in an externally trained policy.

    Replace `load` with your model deserialization and `__call__` with
    inference over the observation. Until then it falls back to goal_greedy,
    which keeps the adapter runnable end to end.
    """

    def __init__(self, model_path: str | None = None):
        self.model_path = model_path
        self.model = None
        if model_path is not None:
            self.load(model_path)

    def load(self, model_path: str) -> None:
        raise NotImplementedError("wire your model loader in here")

    def __call__(self, obs: Observation, config: NegotiatedConfig) -> tuple[float, float]:
        if self.model is None:
            return goal_greedy(obs, config)
        raise NotImplementedError("wire your model inference in here")


POLICIES = {
    "goal_greedy": goal_greedy,
    "adapter": LearnedPolicyAdapter(),
}
