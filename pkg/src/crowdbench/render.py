"""SVG trajectory rendering for qualitative inspection.

Blue dot: robot start. Black star: robot destination. Per-agent polylines
(robot in blue, humans from a fixed palette), human starts as filled dots
and goals as hollow diamonds. Frames violating the personal-space threshold
are highlighted with red markers on the robot path (data-step attributes
carry the frame indices); a collision end is marked with a red cross.
Output is deterministic for a given log.
"""

from __future__ import annotations

from pathlib import Path

from .engine import COLLISION, EpisodeLog
from .geometry import Vec2
from .metrics import MetricConfig, personal_space_violation_steps

_HUMAN_COLORS = ("#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                 "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
_SCALE = 50.0  # px per meter
_MARGIN = 1.0  # meters around the trajectory bounds


def _star_path(cx: float, cy: float, r: float) -> str:
    import math
    pts = []
    for i in range(10):
        ang = -math.pi / 2 + i * math.pi / 5
        rad = r if i % 2 == 0 else 0.4 * r
        pts.append(f"{cx + rad * math.cos(ang):.2f},{cy + rad * math.sin(ang):.2f}")
    return "M" + " L".join(pts) + " Z"


def render_trajectory(log: EpisodeLog, out_path: str | Path | None = None,
                      metric_config: MetricConfig | None = None) -> str:
    """Render a log to an SVG document; optionally write it to out_path."""
    cfg = metric_config or MetricConfig()
    points: list[Vec2] = [log.spec.robot_start, log.spec.robot_goal]
    for h in log.spec.humans:
        points += [h.start, h.goal]
    for frame in log.frames:
        points += [a.position for a in frame]
    min_x = min(p.x for p in points) - _MARGIN
    max_x = max(p.x for p in points) + _MARGIN
    min_y = min(p.y for p in points) - _MARGIN
    max_y = max(p.y for p in points) + _MARGIN

    def sx(x: float) -> float:
        return (x - min_x) * _SCALE

    def sy(y: float) -> float:
        return (max_y - y) * _SCALE  # flip: world +y is up

    width = (max_x - min_x) * _SCALE
    height = (max_y - min_y) * _SCALE

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.2f} {height:.2f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]

    n_agents = 1 + log.n_humans
    for idx in range(n_agents):
        traj = [f[idx].position for f in log.frames]
        pts = " ".join(f"{sx(p.x):.2f},{sy(p.y):.2f}" for p in traj)
        color = "#1f77b4" if idx == 0 else _HUMAN_COLORS[(idx - 1) % len(_HUMAN_COLORS)]
        klass = "robot-path" if idx == 0 else "human-path"
        parts.append(f'<polyline class="{klass}" data-agent="{idx}" points="{pts}" '
                     f'fill="none" stroke="{color}" stroke-width="2"/>')

    rs = log.spec.robot_start
    rg = log.spec.robot_goal
    parts.append(f'<circle class="robot-start" cx="{sx(rs.x):.2f}" cy="{sy(rs.y):.2f}" '
                 f'r="6" fill="#1f77b4"/>')
    parts.append(f'<path class="robot-goal-star" d="{_star_path(sx(rg.x), sy(rg.y), 9.0)}" '
                 f'fill="black"/>')
    for i, h in enumerate(log.spec.humans):
        color = _HUMAN_COLORS[i % len(_HUMAN_COLORS)]
        parts.append(f'<circle class="human-start" data-agent="{i + 1}" '
                     f'cx="{sx(h.start.x):.2f}" cy="{sy(h.start.y):.2f}" r="4" fill="{color}"/>')
        gx, gy = sx(h.goal.x), sy(h.goal.y)
        parts.append(f'<path class="human-goal" data-agent="{i + 1}" '
                     f'd="M{gx:.2f},{gy - 5:.2f} L{gx + 5:.2f},{gy:.2f} '
                     f'L{gx:.2f},{gy + 5:.2f} L{gx - 5:.2f},{gy:.2f} Z" '
                     f'fill="none" stroke="{color}" stroke-width="1.5"/>')

    if log.n_humans > 0:
        for step in personal_space_violation_steps(log, cfg.epsilon):
            p = log.frames[step][0].position
            parts.append(f'<circle class="m1-violation" data-step="{step}" '
                         f'cx="{sx(p.x):.2f}" cy="{sy(p.y):.2f}" r="4" '
                         f'fill="none" stroke="red" stroke-width="1.5"/>')

    if log.outcome == COLLISION:
        p = log.frames[-1][0].position
        x, y = sx(p.x), sy(p.y)
        parts.append(f'<path class="collision-marker" d="M{x - 7:.2f},{y - 7:.2f} '
                     f'L{x + 7:.2f},{y + 7:.2f} M{x - 7:.2f},{y + 7:.2f} '
                     f'L{x + 7:.2f},{y - 7:.2f}" stroke="red" stroke-width="3"/>')

    legend = [
        "Blue dot: robot start. Black star: robot destination.",
        f"Outcome: {log.outcome}. Red rings: personal-space violations "
        f"(epsilon = {cfg.epsilon} m).",
    ]
    for i, text in enumerate(legend):
        parts.append(f'<text x="8" y="{16 + 14 * i}" font-size="11" '
                     f'font-family="sans-serif">{text}</text>')
    parts.append("</svg>")
    doc = "\n".join(parts) + "\n"

    if out_path is not None:
        Path(out_path).write_text(doc, encoding="utf-8")
    return doc
