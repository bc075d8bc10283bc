"""2D geometric primitives: vectors, oriented rectangles, and the
intersection and distance predicates used by the simulator and the metrics.

All operations are pure functions on immutable value types and are safe to
call concurrently. Predicates are evaluated per discrete timestep; there is
no swept-volume (continuous-time) intersection here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInputError

# Speeds below this are treated as stationary: the projected rectangle
# degenerates to zero length and intersects nothing.
STATIONARY_SPEED = 1e-6


@dataclass(frozen=True, slots=True)
class Vec2:
    """Immutable 2D vector in meters (or m/s when used as a velocity)."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Vec2":
        return Vec2(self.x / s, self.y / s)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def det(self, other: "Vec2") -> float:
        """2D cross product: positive when `other` lies to the left of self."""
        return self.x * other.y - self.y * other.x

    def norm_sq(self) -> float:
        return self.x * self.x + self.y * self.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            return Vec2(0.0, 0.0)
        return Vec2(self.x / n, self.y / n)

    def perp(self) -> "Vec2":
        """Left-hand perpendicular (rotate +90 degrees)."""
        return Vec2(-self.y, self.x)

    def distance_to(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def _require_finite(*vecs: Vec2) -> None:
    for v in vecs:
        if not v.is_finite():
            raise InvalidInputError(f"non-finite vector component: {v}")


@dataclass(frozen=True, slots=True)
class OrientedRect:
    """Rectangle anchored at the midpoint of its rear edge.

    The rectangle extends `length` meters along `direction` (a unit vector
    when length > 0) and `width` meters across it. A zero-length rectangle
    is degenerate and intersects nothing.
    """

    anchor: Vec2
    direction: Vec2
    length: float
    width: float

    def __post_init__(self) -> None:
        _require_finite(self.anchor, self.direction)
        if not math.isfinite(self.length) or self.length < 0.0:
            raise InvalidInputError(f"rectangle length must be >= 0, got {self.length}")
        if not math.isfinite(self.width) or self.width <= 0.0:
            raise InvalidInputError(f"rectangle width must be > 0, got {self.width}")
        if self.length > 0.0 and abs(self.direction.norm() - 1.0) > 1e-9:
            raise InvalidInputError(f"direction must be a unit vector, got {self.direction}")

    @property
    def is_degenerate(self) -> bool:
        return self.length == 0.0

    def corners(self) -> tuple[Vec2, Vec2, Vec2, Vec2]:
        """Four corners in order: rear-left, rear-right, front-right, front-left."""
        half = 0.5 * self.width * self.direction.perp()
        forward = self.length * self.direction
        rear_l = self.anchor + half
        rear_r = self.anchor - half
        return (rear_l, rear_r, rear_r + forward, rear_l + forward)


def rect_from_agent(position: Vec2, velocity: Vec2, width: float, horizon: float) -> OrientedRect:
    """Project an agent's safety rectangle along its velocity.

    The rectangle starts at the agent's current position and extends
    horizon * speed meters forward. Stationary agents (speed below
    STATIONARY_SPEED) yield a degenerate zero-length rectangle.
    """
    _require_finite(position, velocity)
    if not math.isfinite(width) or width <= 0.0:
        raise InvalidInputError(f"width must be > 0, got {width}")
    if not math.isfinite(horizon) or horizon <= 0.0:
        raise InvalidInputError(f"horizon must be > 0, got {horizon}")
    speed = velocity.norm()
    if speed < STATIONARY_SPEED:
        return OrientedRect(position, Vec2(1.0, 0.0), 0.0, width)
    return OrientedRect(position, velocity / speed, horizon * speed, width)


def _project_extent(corners: Iterable[Vec2], axis: Vec2) -> tuple[float, float]:
    lo = math.inf
    hi = -math.inf
    for c in corners:
        d = c.dot(axis)
        if d < lo:
            lo = d
        if d > hi:
            hi = d
    return lo, hi


def rects_intersect(a: OrientedRect, b: OrientedRect) -> bool:
    """True iff the closed rectangles share at least one point.

    Separating-axis decision over the four candidate axes (two edge normals
    per rectangle). Degenerate rectangles never intersect anything.
    """
    if a.is_degenerate or b.is_degenerate:
        return False
    ca = a.corners()
    cb = b.corners()
    for axis in (a.direction, a.direction.perp(), b.direction, b.direction.perp()):
        a_lo, a_hi = _project_extent(ca, axis)
        b_lo, b_hi = _project_extent(cb, axis)
        if a_hi < b_lo or b_hi < a_lo:
            return False
    return True


def rect_separation(a: OrientedRect, b: OrientedRect) -> float:
    """Signed gap between two rectangles along the best separating axis.

    Positive: the rectangles are disjoint by at least that distance.
    Negative: every candidate axis overlaps by at least |value|.
    Useful for excluding knife-edge cases from sampling-based oracles.
    """
    best = -math.inf
    ca = a.corners()
    cb = b.corners()
    for axis in (a.direction, a.direction.perp(), b.direction, b.direction.perp()):
        a_lo, a_hi = _project_extent(ca, axis)
        b_lo, b_hi = _project_extent(cb, axis)
        gap = max(b_lo - a_hi, a_lo - b_hi)
        if gap > best:
            best = gap
    return best


def point_in_rect(p: Vec2, rect: OrientedRect) -> bool:
    """Closed-set membership test in the rectangle's local frame."""
    rel = p - rect.anchor
    along = rel.dot(rect.direction)
    across = rel.dot(rect.direction.perp())
    return 0.0 <= along <= rect.length and abs(across) <= 0.5 * rect.width


def min_center_distance(p: Vec2, others: Sequence[Vec2]) -> float:
    """Minimum Euclidean distance from `p` to any point in `others`.

    Raises ValueError on an empty list: callers must skip distance-based
    metrics in zero-human scenes.
    """
    if not others:
        raise ValueError("min_center_distance requires at least one other position")
    _require_finite(p, *others)
    return min(p.distance_to(o) for o in others)
