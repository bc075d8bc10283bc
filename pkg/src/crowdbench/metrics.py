"""Per-episode social-conformity metrics and cross-episode aggregation.

Duration metrics (personal space, projected path, walking speed) are
reported as a dimensionless frame fraction (violating frames / total
frames) together with the violation time in seconds (fraction * T, where
T = frame count * dt); the fraction is independent of the step size and
bounded to [0, 1]. The jerk metric is the mean squared third derivative of
the robot's position over the steps where the backward difference is
defined. Aggregation follows the benchmark's convention: percentages over
all non-aborted episodes, metric statistics over successful episodes only.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace

from .engine import COLLISION, SUCCESS, TIMEOUT, EpisodeLog
from .errors import InvalidInputError, VisibilityError
from .geometry import min_center_distance, rect_from_agent, rects_intersect
from .scenarios import SINGLE_HUMAN_KINDS

LEFT = "left"
RIGHT = "right"
UNDETERMINED = "undetermined"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True, slots=True)
class MetricConfig:
    epsilon: float = 1.2              # personal-space radius, meters
    projection_horizon: float = 1.0   # velocity-rectangle projection, seconds
    speed_limit: float = 1.5          # max normal walking speed, m/s
    side_majority_vote: bool = False  # label side over the whole approach window

    def __post_init__(self) -> None:
        for name in ("epsilon", "projection_horizon", "speed_limit"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"MetricConfig.{name} must be strictly positive")


# Reproduces the benchmark evaluation setting where epsilon matches the
# person radius instead of the general proxemics default.
REPRODUCTION_METRICS = MetricConfig(epsilon=0.2)


@dataclass(frozen=True, slots=True)
class MetricReport:
    """Per-episode metric values. None marks a not-applicable value."""

    kind: str
    outcome: str
    nav_time_s: float
    m1: float | None
    m1_seconds: float | None
    m2: float | None
    m2_seconds: float | None
    m3_seconds: float | None
    m4: float | None
    m5: float
    m5_seconds: float
    side_label: str


@dataclass(frozen=True, slots=True)
class AggregateReport:
    """Cross-episode summary for one scenario kind."""

    episodes: int  # counted episodes (aborted excluded)
    aborted: int
    success_pct: float
    collision_pct: float
    timeout_pct: float
    nav_time_mean: float | None
    nav_time_std: float | None
    m1_mean: float | None
    m1_std: float | None
    m2_mean: float | None
    m2_std: float | None
    m3_mean: float | None
    m3_std: float | None
    m4_mean: float | None
    m4_std: float | None
    m5_mean: float | None
    m5_std: float | None
    side_left_pct: float | None
    side_right_pct: float | None
    side_undetermined: int
    side_cases: int


def personal_space_violation_steps(log: EpisodeLog, epsilon: float) -> list[int]:
    """Frame indices where some human is closer to the robot than epsilon."""
    steps = []
    for idx, frame in enumerate(log.frames):
        robot = frame[0]
        if len(frame) > 1:
            dist = min_center_distance(robot.position, [h.position for h in frame[1:]])
            if dist < epsilon:
                steps.append(idx)
    return steps


def metric_personal_space(log: EpisodeLog, cfg: MetricConfig) -> tuple[float, float] | None:
    """Fraction of frames (and seconds) the robot spends inside the minimum
    comfortable personal space of any human. None for zero-human scenes."""
    if log.n_humans == 0:
        return None
    count = len(personal_space_violation_steps(log, cfg.epsilon))
    fraction = count / len(log.frames)
    return fraction, fraction * log.total_time


def projected_path_violation_steps(log: EpisodeLog, cfg: MetricConfig) -> list[int]:
    steps = []
    for idx, frame in enumerate(log.frames):
        robot = frame[0]
        robot_rect = rect_from_agent(robot.position, robot.velocity,
                                     2.0 * robot.radius, cfg.projection_horizon)
        if robot_rect.is_degenerate:
            continue
        for h in frame[1:]:
            h_rect = rect_from_agent(h.position, h.velocity,
                                     2.0 * h.radius, cfg.projection_horizon)
            if rects_intersect(robot_rect, h_rect):
                steps.append(idx)
                break
    return steps


def metric_projected_path(log: EpisodeLog, cfg: MetricConfig) -> tuple[float, float] | None:
    """Fraction of frames (and seconds) where the robot's velocity rectangle
    intersects at least one human's. None for zero-human scenes."""
    if log.n_humans == 0:
        return None
    count = len(projected_path_violation_steps(log, cfg))
    fraction = count / len(log.frames)
    return fraction, fraction * log.total_time


def metric_aggregated_time(log: EpisodeLog) -> float:
    """Total goal-reaching time summed over the robot and every human.

    Only meaningful when the humans actually react to the robot, so logs
    recorded in invisible-robot mode are rejected.
    """
    if not log.spec.robot_visible:
        raise VisibilityError(
            "aggregated time requires a visible-robot log; this log was "
            "recorded with an invisible robot")
    return log.robot_nav_time + sum(log.human_nav_times)


def metric_integrated_jerk(log: EpisodeLog) -> float | None:
    """Mean squared jerk of the robot's position, (m/s^3)^2.

    Jerk at step t is the third-order backward difference of position
    divided by dt^3; the average runs over the steps where that stencil
    exists. None when the log has fewer than 4 frames.
    """
    if len(log.frames) < 4:
        return None
    dt3 = log.dt ** 3
    total = 0.0
    robot = log.robot_states()
    for t in range(3, len(robot)):
        p0 = robot[t].position
        p1 = robot[t - 1].position
        p2 = robot[t - 2].position
        p3 = robot[t - 3].position
        jx = (p0.x - 3.0 * p1.x + 3.0 * p2.x - p3.x) / dt3
        jy = (p0.y - 3.0 * p1.y + 3.0 * p2.y - p3.y) / dt3
        total += jx * jx + jy * jy
    return total / (len(robot) - 3)


def metric_walking_speed(log: EpisodeLog, cfg: MetricConfig) -> tuple[float, float]:
    """Fraction of frames (and seconds) where the robot's speed exceeds the
    maximum normal human walking speed."""
    count = sum(1 for f in log.frames if f[0].velocity.norm() > cfg.speed_limit)
    fraction = count / len(log.frames)
    return fraction, fraction * log.total_time


def metric_side_preference(log: EpisodeLog, majority_vote: bool = False) -> str:
    """Which side the robot kept the human on during its final approach.

    Applicable to the single-human scenario kinds with the robot travelling
    in +y. The label is read at the last frame where the robot is still
    behind the human (robot_y < human_y + both radii): "left" when the human
    is to the robot's +x, "right" when to its -x. With majority_vote=True
    the label is the majority over all approach frames instead.
    """
    if log.spec.kind not in SINGLE_HUMAN_KINDS:
        raise InvalidInputError(
            f"side preference applies to single-human kinds, not {log.spec.kind.value}")
    if log.n_humans < 1:
        return UNDETERMINED

    def frame_label(frame) -> str | None:
        robot, human = frame[0], frame[1]
        if robot.position.y < human.position.y + human.radius + robot.radius:
            if human.position.x > robot.position.x:
                return LEFT
            if human.position.x < robot.position.x:
                return RIGHT
            return UNDETERMINED
        return None

    labels = [lab for lab in map(frame_label, log.frames) if lab is not None]
    if not labels:
        return UNDETERMINED
    if not majority_vote:
        return labels[-1]
    left = labels.count(LEFT)
    right = labels.count(RIGHT)
    if left > right:
        return LEFT
    if right > left:
        return RIGHT
    return UNDETERMINED


def score_episode(log: EpisodeLog, cfg: MetricConfig) -> MetricReport:
    """Compute every applicable metric for one episode."""
    m1 = metric_personal_space(log, cfg)
    m2 = metric_projected_path(log, cfg)
    m3 = metric_aggregated_time(log) if log.spec.robot_visible else None
    m4 = metric_integrated_jerk(log)
    m5, m5_seconds = metric_walking_speed(log, cfg)
    if log.spec.kind in SINGLE_HUMAN_KINDS:
        side = metric_side_preference(log, cfg.side_majority_vote)
    else:
        side = NOT_APPLICABLE
    return MetricReport(
        kind=log.spec.kind.value,
        outcome=log.outcome,
        nav_time_s=log.robot_nav_time,
        m1=m1[0] if m1 else None,
        m1_seconds=m1[1] if m1 else None,
        m2=m2[0] if m2 else None,
        m2_seconds=m2[1] if m2 else None,
        m3_seconds=m3,
        m4=m4,
        m5=m5,
        m5_seconds=m5_seconds,
        side_label=side,
    )


def _mean_std(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def aggregate(reports: list[MetricReport]) -> AggregateReport:
    """Summarize one scenario kind's episode reports.

    Outcome percentages run over non-aborted episodes; metric statistics
    (mean, sample standard deviation) run over successful episodes only.
    Side-preference percentages run over successful episodes with a
    determinate label.
    """
    if not reports:
        raise InvalidInputError("aggregate requires at least one report")
    counted = [r for r in reports if r.outcome in (SUCCESS, COLLISION, TIMEOUT)]
    aborted = len(reports) - len(counted)
    n = len(counted)
    succ = [r for r in counted if r.outcome == SUCCESS]

    def pct(outcome: str) -> float:
        if n == 0:
            return 0.0
        return 100.0 * sum(1 for r in counted if r.outcome == outcome) / n

    def stats(getter) -> tuple[float | None, float | None]:
        return _mean_std([getter(r) for r in succ if getter(r) is not None])

    side_labels = [r.side_label for r in succ if r.side_label != NOT_APPLICABLE]
    determinate = [lab for lab in side_labels if lab in (LEFT, RIGHT)]
    left_pct = right_pct = None
    if determinate:
        left_pct = 100.0 * determinate.count(LEFT) / len(determinate)
        right_pct = 100.0 * determinate.count(RIGHT) / len(determinate)

    nav_mean, nav_std = stats(lambda r: r.nav_time_s)
    m1_mean, m1_std = stats(lambda r: r.m1)
    m2_mean, m2_std = stats(lambda r: r.m2)
    m3_mean, m3_std = stats(lambda r: r.m3_seconds)
    m4_mean, m4_std = stats(lambda r: r.m4)
    m5_mean, m5_std = stats(lambda r: r.m5)
    return AggregateReport(
        episodes=n,
        aborted=aborted,
        success_pct=pct(SUCCESS),
        collision_pct=pct(COLLISION),
        timeout_pct=pct(TIMEOUT),
        nav_time_mean=nav_mean,
        nav_time_std=nav_std,
        m1_mean=m1_mean, m1_std=m1_std,
        m2_mean=m2_mean, m2_std=m2_std,
        m3_mean=m3_mean, m3_std=m3_std,
        m4_mean=m4_mean, m4_std=m4_std,
        m5_mean=m5_mean, m5_std=m5_std,
        side_left_pct=left_pct,
        side_right_pct=right_pct,
        side_undetermined=side_labels.count(UNDETERMINED),
        side_cases=len(determinate),
    )


def attach_visible_m3(base: AggregateReport, visible: AggregateReport) -> AggregateReport:
    """Overlay the aggregated-time statistics from a visible-robot run onto
    an invisible-run aggregate (the two run sets use independent seeds)."""
    return replace(base, m3_mean=visible.m3_mean, m3_std=visible.m3_std)
