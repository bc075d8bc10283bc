"""Reciprocal collision avoidance in velocity space.

Every neighbor contributes a half-plane of admissible velocities (each agent
takes half the responsibility for avoiding the pair's velocity obstacle,
truncated at the time horizon). The solver returns the admissible velocity
closest to the agent's preferred velocity via incremental linear programming
over the speed disc, falling back to the least-penetrating velocity when the
constraints admit no common point.

The arithmetic deliberately stays in plain floats: this is the innermost
loop of every episode, and scalar math beats array dispatch at this size.
All functions are pure and deterministic; neighbors are ordered by agent id
before constraints are built so ties break reproducibly.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

from .agents import AgentState, OrcaParams, clamp_speed, preferred_velocity
from .errors import InvalidInputError
from .geometry import Vec2

_EPS = 1e-10

# A constraint line in velocity space as plain floats:
# (point_x, point_y, dir_x, dir_y). Feasible velocities lie to the LEFT of
# the directed line, i.e. det(direction, v - point) >= 0.
_Line = tuple[float, float, float, float]


class HalfPlane(NamedTuple):
    """Admissible-velocity half-plane; feasible iff slack(v) >= 0."""

    point_x: float
    point_y: float
    dir_x: float
    dir_y: float

    def slack(self, vx: float, vy: float) -> float:
        return self.dir_x * (vy - self.point_y) - self.dir_y * (vx - self.point_x)


def _build_lines(state: AgentState, neighbors: Sequence[AgentState],
                 params: OrcaParams, dt: float) -> list[_Line]:
    px = state.position.x
    py = state.position.y
    vx = state.velocity.x
    vy = state.velocity.y
    inv_horizon = 1.0 / params.time_horizon_agents
    inv_dt = 1.0 / dt
    nd_sq = params.neighbor_dist * params.neighbor_dist

    # Nearest max_neighbors within range, then reorder by id so the
    # constraint sequence (and therefore LP tie-breaking) is reproducible.
    cands: list[tuple[float, int, AgentState]] = []
    for other in neighbors:
        rx = other.position.x - px
        ry = other.position.y - py
        d_sq = rx * rx + ry * ry
        if d_sq < nd_sq:
            cands.append((d_sq, other.id, other))
    cands.sort(key=lambda c: (c[0], c[1]))
    del cands[params.max_neighbors:]
    cands.sort(key=lambda c: c[1])

    lines: list[_Line] = []
    for _, _, other in cands:
        rel_x = other.position.x - px
        rel_y = other.position.y - py
        rvx = vx - other.velocity.x
        rvy = vy - other.velocity.y
        dist_sq = rel_x * rel_x + rel_y * rel_y
        r = state.radius + other.radius
        r_sq = r * r

        if dist_sq > r_sq:
            # Not currently overlapping: velocity obstacle truncated at the
            # horizon. w points from the cut-off center to the relative velocity.
            wx = rvx - inv_horizon * rel_x
            wy = rvy - inv_horizon * rel_y
            w_len_sq = wx * wx + wy * wy
            dot1 = wx * rel_x + wy * rel_y
            if dot1 < 0.0 and dot1 * dot1 > r_sq * w_len_sq:
                # Closest exit is through the cut-off circle.
                w_len = math.sqrt(w_len_sq)
                ux = wx / w_len
                uy = wy / w_len
                dir_x = uy
                dir_y = -ux
                scale = r * inv_horizon - w_len
                u_x = scale * ux
                u_y = scale * uy
            else:
                # Closest exit is through one of the cone legs.
                leg = math.sqrt(dist_sq - r_sq)
                if rel_x * wy - rel_y * wx > 0.0:
                    dir_x = (rel_x * leg - rel_y * r) / dist_sq
                    dir_y = (rel_x * r + rel_y * leg) / dist_sq
                else:
                    dir_x = -(rel_x * leg + rel_y * r) / dist_sq
                    dir_y = (rel_x * r - rel_y * leg) / dist_sq
                dot2 = rvx * dir_x + rvy * dir_y
                u_x = dot2 * dir_x - rvx
                u_y = dot2 * dir_y - rvy
        else:
            # Already overlapping: constraint resolves the penetration within
            # one timestep instead of the horizon.
            wx = rvx - inv_dt * rel_x
            wy = rvy - inv_dt * rel_y
            w_len = math.sqrt(wx * wx + wy * wy)
            if w_len > _EPS:
                ux = wx / w_len
                uy = wy / w_len
            elif dist_sq > _EPS:
                d = math.sqrt(dist_sq)
                ux = -rel_x / d
                uy = -rel_y / d
            else:
                ux, uy = 1.0, 0.0  # coincident centers: arbitrary but fixed
            dir_x = uy
            dir_y = -ux
            scale = r * inv_dt - w_len
            u_x = scale * ux
            u_y = scale * uy

        # Each agent takes half of the correction u (reciprocity).
        lines.append((vx + 0.5 * u_x, vy + 0.5 * u_y, dir_x, dir_y))
    return lines


def _lp1(lines: list[_Line], line_no: int, radius: float, ox: float, oy: float,
         dir_opt: bool, rx: float, ry: float) -> tuple[bool, float, float]:
    """Optimize along constraint `line_no`, subject to earlier constraints
    and the speed disc. Returns (feasible, x, y)."""
    px, py, dx, dy = lines[line_no]
    dot = px * dx + py * dy
    disc = dot * dot + radius * radius - (px * px + py * py)
    if disc < 0.0:
        # The line misses the speed disc entirely.
        return False, rx, ry
    sq = math.sqrt(disc)
    t_left = -dot - sq
    t_right = -dot + sq

    for i in range(line_no):
        qx, qy, ex, ey = lines[i]
        denom = dx * ey - dy * ex
        numer = ex * (py - qy) - ey * (px - qx)
        if abs(denom) <= _EPS:
            if numer < 0.0:
                return False, rx, ry
            continue
        t = numer / denom
        if denom >= 0.0:
            if t < t_right:
                t_right = t
        else:
            if t > t_left:
                t_left = t
        if t_left > t_right:
            return False, rx, ry

    if dir_opt:
        t = t_right if ox * dx + oy * dy > 0.0 else t_left
    else:
        t = dx * (ox - px) + dy * (oy - py)
        if t < t_left:
            t = t_left
        elif t > t_right:
            t = t_right
    return True, px + t * dx, py + t * dy


def _lp2(lines: list[_Line], radius: float, ox: float, oy: float,
         dir_opt: bool) -> tuple[int, float, float]:
    """Incremental 2D LP. Returns (len(lines), x, y) on success, else the
    index of the constraint that emptied the feasible region."""
    if dir_opt:
        # (ox, oy) is a unit direction: start at the disc edge.
        rx = ox * radius
        ry = oy * radius
    else:
        o_sq = ox * ox + oy * oy
        if o_sq > radius * radius:
            o_len = math.sqrt(o_sq)
            rx = ox / o_len * radius
            ry = oy / o_len * radius
        else:
            rx = ox
            ry = oy

    for i, (px, py, dx, dy) in enumerate(lines):
        if dx * (py - ry) - dy * (px - rx) > 0.0:
            ok, nx, ny = _lp1(lines, i, radius, ox, oy, dir_opt, rx, ry)
            if not ok:
                return i, rx, ry
            rx, ry = nx, ny
    return len(lines), rx, ry


def _lp3(lines: list[_Line], num_fixed: int, begin: int, radius: float,
         rx: float, ry: float) -> tuple[float, float]:
    """Infeasible fallback: relax the constraints uniformly and take the
    velocity with the smallest worst-case penetration."""
    distance = 0.0
    for i in range(begin, len(lines)):
        px, py, dx, dy = lines[i]
        if dx * (py - ry) - dy * (px - rx) > distance:
            proj: list[_Line] = list(lines[:num_fixed])
            for j in range(num_fixed, i):
                qx, qy, ex, ey = lines[j]
                det = dx * ey - dy * ex
                if abs(det) <= _EPS:
                    if dx * ex + dy * ey > 0.0:
                        continue  # parallel, same direction: redundant
                    mx = 0.5 * (px + qx)
                    my = 0.5 * (py + qy)
                else:
                    t = (ex * (py - qy) - ey * (px - qx)) / det
                    mx = px + t * dx
                    my = py + t * dy
                gx = ex - dx
                gy = ey - dy
                g_len = math.sqrt(gx * gx + gy * gy)
                proj.append((mx, my, gx / g_len, gy / g_len))
            tx, ty = rx, ry
            fail, rx, ry = _lp2(proj, radius, -dy, dx, True)
            if fail < len(proj):
                # Should not happen except through rounding; keep the
                # previous iterate.
                rx, ry = tx, ty
            distance = dx * (py - ry) - dy * (px - rx)
    return rx, ry


def orca_halfplanes(state: AgentState, neighbors: Sequence[AgentState],
                    params: OrcaParams, dt: float) -> list[HalfPlane]:
    """The half-plane constraints orca_velocity solves, for inspection."""
    if dt <= 0.0 or not math.isfinite(dt):
        raise InvalidInputError(f"dt must be > 0, got {dt}")
    return [HalfPlane(*ln) for ln in _build_lines(state, neighbors, params, dt)]


def orca_velocity(state: AgentState, neighbors: Sequence[AgentState],
                  params: OrcaParams, dt: float) -> Vec2:
    """New velocity for `state`: the admissible velocity closest to its
    preferred velocity, with norm <= params.max_speed.

    Overlapping agents are handled by the penetration branch of the
    constraint construction; they never raise.
    """
    if dt <= 0.0 or not math.isfinite(dt):
        raise InvalidInputError(f"dt must be > 0, got {dt}")
    lines = _build_lines(state, neighbors, params, dt)
    pref = preferred_velocity(state, dt)
    fail, vx, vy = _lp2(lines, params.max_speed, pref.x, pref.y, False)
    if fail < len(lines):
        vx, vy = _lp3(lines, 0, fail, params.max_speed, vx, vy)
    return Vec2(*clamp_speed(vx, vy, params.max_speed))
