"""Shared builders for synthetic episode logs, scene transforms, and the
independent brute-force oracles used by both the unit tests and the
acceptance suite."""

from __future__ import annotations

import math
import random
from dataclasses import replace

import numpy as np

from crowdbench import (AgentState, EpisodeLog, HumanSpec, ScenarioKind,
                        ScenarioSpec, SimConfig, Vec2)
from crowdbench.agents import HUMAN, ROBOT, preferred_velocity
from crowdbench.orca import orca_halfplanes


def synthetic_log(frames_pos, frames_vel=None, *, dt=0.25,
                  kind=ScenarioKind.RANDOM, robot_visible=False,
                  outcome="success", radius=0.2, robot_nav_time=None,
                  human_nav_times=None, config=None) -> EpisodeLog:
    """Build an EpisodeLog from raw per-frame [agent][x, y] arrays.

    frames_pos[k][a] is agent a's position at frame k (agent 0 = robot).
    frames_vel defaults to zeros. Goals are taken from the last frame.
    """
    n_frames = len(frames_pos)
    n_agents = len(frames_pos[0])
    if frames_vel is None:
        frames_vel = [[(0.0, 0.0)] * n_agents for _ in range(n_frames)]

    goals = [Vec2(*frames_pos[-1][a]) for a in range(n_agents)]
    humans = tuple(HumanSpec(Vec2(*frames_pos[0][a]), goals[a], 1.0, radius)
                   for a in range(1, n_agents))
    spec = ScenarioSpec(kind=ScenarioKind(kind), robot_start=Vec2(*frames_pos[0][0]),
                        robot_goal=goals[0], humans=humans, seed=0,
                        robot_visible=robot_visible)
    if config is None:
        config = SimConfig(dt=dt, robot_visible=robot_visible, robot_radius=radius)

    frames = []
    for k in range(n_frames):
        frame = []
        for a in range(n_agents):
            frame.append(AgentState(
                a, Vec2(*frames_pos[k][a]), Vec2(*frames_vel[k][a]), radius,
                goals[a], 1.0, ROBOT if a == 0 else HUMAN))
        frames.append(frame)

    end_time = (n_frames - 1) * dt
    return EpisodeLog(
        spec=spec, config=config, dt=dt, frames=frames, outcome=outcome,
        robot_nav_time=end_time if robot_nav_time is None else robot_nav_time,
        human_nav_times=(human_nav_times if human_nav_times is not None
                         else [end_time] * (n_agents - 1)),
    )


def mirror_x(v: Vec2) -> Vec2:
    return Vec2(-v.x, v.y)


def mirror_log(log: EpisodeLog) -> EpisodeLog:
    """Negate every x coordinate (positions, velocities, starts, goals)."""
    spec = replace(
        log.spec,
        robot_start=mirror_x(log.spec.robot_start),
        robot_goal=mirror_x(log.spec.robot_goal),
        humans=tuple(replace(h, start=mirror_x(h.start), goal=mirror_x(h.goal))
                     for h in log.spec.humans),
    )
    frames = [[replace_agent_mirror(a) for a in frame] for frame in log.frames]
    return EpisodeLog(spec=spec, config=log.config, dt=log.dt, frames=frames,
                      outcome=log.outcome, robot_nav_time=log.robot_nav_time,
                      human_nav_times=list(log.human_nav_times),
                      human_collision_steps=list(log.human_collision_steps),
                      clipped_steps=list(log.clipped_steps),
                      abort_reason=log.abort_reason)


def replace_agent_mirror(a: AgentState) -> AgentState:
    return AgentState(a.id, mirror_x(a.position), mirror_x(a.velocity), a.radius,
                      mirror_x(a.goal), a.preferred_speed, a.kind)


# --- independent oracles -------------------------------------------------

def np_rect_corners(px, py, vx, vy, width, horizon):
    """Velocity-rectangle corners computed from scratch (None if stationary)."""
    speed = math.hypot(vx, vy)
    if speed < 1e-6:
        return None
    dx, dy = vx / speed, vy / speed
    length = horizon * speed
    hw = width / 2
    rear_l = (px - hw * dy, py + hw * dx)
    rear_r = (px + hw * dy, py - hw * dx)
    return np.array([rear_l, rear_r,
                     (rear_r[0] + length * dx, rear_r[1] + length * dy),
                     (rear_l[0] + length * dx, rear_l[1] + length * dy)])


def np_sat_intersect(ca, cb) -> bool:
    """Independent separating-axis check on explicit corner arrays."""
    for corners in (ca, cb):
        for k in range(4):
            edge = corners[(k + 1) % 4] - corners[k]
            axis = np.array([-edge[1], edge[0]])
            pa = ca @ axis
            pb = cb @ axis
            if pa.max() < pb.min() or pb.max() < pa.min():
                return False
    return True


def make_agent(aid, px, py, vx, vy, gx, gy, radius=0.2, pref=1.0, kind=HUMAN):
    return AgentState(aid, Vec2(px, py), Vec2(vx, vy), radius, Vec2(gx, gy),
                      pref, kind)


def random_scene(rng: random.Random, n_agents: int):
    """Non-overlapping agents in an 8x8 box with random goals/velocities."""
    agents = []
    while len(agents) < n_agents:
        px, py = rng.uniform(-4, 4), rng.uniform(-4, 4)
        radius = rng.uniform(0.15, 0.3)
        if any(math.hypot(px - o.position.x, py - o.position.y)
               < radius + o.radius + 0.05 for o in agents):
            continue
        speed = rng.uniform(0, 1)
        ang = rng.uniform(0, 2 * math.pi)
        agents.append(make_agent(len(agents), px, py, speed * math.cos(ang),
                                 speed * math.sin(ang), rng.uniform(-4, 4),
                                 rng.uniform(-4, 4), radius=radius))
    return agents


def grid_minimizer(state, neighbors, params, dt, pitch=0.005, rounds=4):
    """Brute-force velocity-space search: admissible grid velocity closest to
    the preferred velocity, or None if no grid point is feasible.

    After the initial full-disc sweep at `pitch`, the grid is re-sampled at
    finer pitch over the bounding box of the near-optimal feasible points:
    the distance objective is flat along an active constraint, so the coarse
    argmin alone can sit well away from the true minimizer even when its
    cost is nearly optimal.
    """
    lines = orca_halfplanes(state, neighbors, params, dt)
    pref = preferred_velocity(state, dt)
    m = params.max_speed
    x0, x1, y0, y1 = -m, m, -m, m
    best = None
    for _ in range(rounds):
        step = max(pitch, (x1 - x0) / 1500, (y1 - y0) / 1500)
        xs = np.arange(x0, x1 + step / 2, step)
        ys = np.arange(y0, y1 + step / 2, step)
        vx, vy = np.meshgrid(xs, ys)
        mask = vx * vx + vy * vy <= m * m
        for hp in lines:
            mask &= (hp.dir_x * (vy - hp.point_y) - hp.dir_y * (vx - hp.point_x)) >= 0.0
        if not mask.any():
            return None  # only possible on the first sweep
        cost = np.hypot(vx - pref.x, vy - pref.y)
        cost[~mask] = np.inf
        idx = np.unravel_index(np.argmin(cost), cost.shape)
        best = Vec2(float(vx[idx]), float(vy[idx]))
        near = mask & (cost <= cost[idx] + 2.5 * step)
        x0, x1 = float(vx[near].min()) - step, float(vx[near].max()) + step
        y0, y1 = float(vy[near].min()) - step, float(vy[near].max()) + step
        pitch /= 8.0
    return best
