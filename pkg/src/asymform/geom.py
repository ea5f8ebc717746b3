"""Planar geometry primitives shared by the rest of the package.

Everything here is a pure function of immutable values.  A single relative
tolerance ``TAU`` governs on-circle, on-line and coincidence predicates; it is
applied relative to the radius of whatever circle is involved.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from collections import namedtuple
from typing import Iterable, NamedTuple, Sequence

TAU = 1e-9
TWO_PI = 2.0 * math.pi

# Welzl in-circle slack; much tighter than TAU so sec() is exact to rounding.
_SEC_SLACK = 1e-13


class GeometryError(ValueError):
    pass


class Point(namedtuple("Point", "x y")):
    __slots__ = ()

    def __new__(cls, x, y):
        x = float(x)
        y = float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"non-finite coordinate ({x}, {y})")
        return super().__new__(cls, x, y)

    def __add__(self, other):
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scaled(self, k: float) -> Point:
        return Point(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


class Circle(NamedTuple):
    center: Point
    radius: float

    def contains(self, p, slack: float = TAU) -> bool:
        return dist(p, self.center) <= self.radius * (1.0 + slack) + slack * 1e-3

    def on_boundary(self, p, tol: float = TAU) -> bool:
        return abs(dist(p, self.center) - self.radius) <= tol * max(self.radius, 1e-300)

    def point_at(self, angle: float) -> Point:
        return Point(self.center.x + self.radius * math.cos(angle),
                     self.center.y + self.radius * math.sin(angle))

    def angle_of(self, p) -> float:
        return math.atan2(p[1] - self.center.y, p[0] - self.center.x) % TWO_PI


class Segment(NamedTuple):
    a: Point
    b: Point

    @property
    def length(self) -> float:
        return dist(self.a, self.b)

    def point_at(self, t: float) -> Point:
        return lerp(self.a, self.b, t)


class Direction(enum.IntEnum):
    CCW = 1
    CW = -1


class Arc(NamedTuple):
    circle: Circle
    from_angle: float
    to_angle: float
    direction: Direction

    @property
    def sweep(self) -> float:
        """Unsigned angle swept, in [0, 2*pi)."""
        if self.direction is Direction.CCW:
            return (self.to_angle - self.from_angle) % TWO_PI
        return (self.from_angle - self.to_angle) % TWO_PI

    @property
    def length(self) -> float:
        return self.sweep * self.circle.radius

    @property
    def start(self) -> Point:
        return self.circle.point_at(self.from_angle)

    @property
    def end(self) -> Point:
        return self.circle.point_at(self.to_angle)

    def point_at(self, t: float) -> Point:
        if t >= 1.0:
            return self.end
        return self.circle.point_at(self.from_angle + int(self.direction) * self.sweep * t)

    def contains_angle(self, angle: float, tol: float = 0.0) -> bool:
        """True if ``angle`` lies on the swept part of the arc."""
        if self.direction is Direction.CCW:
            off = (angle - self.from_angle) % TWO_PI
        else:
            off = (self.from_angle - angle) % TWO_PI
        return off <= self.sweep + tol or off >= TWO_PI - tol


def arc_between(circle: Circle, a, b, direction: Direction) -> Arc:
    return Arc(circle, circle.angle_of(a), circle.angle_of(b), direction)


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def lerp(p, q, t: float) -> Point:
    return Point(p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t)


def cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def ccw_angle(a: float, b: float) -> float:
    """Counter-clockwise angular distance from angle ``a`` to angle ``b``."""
    return (b - a) % TWO_PI


def point_segment_distance(p, a, b) -> float:
    ax, ay = a
    dx = b[0] - ax
    dy = b[1] - ay
    den = dx * dx + dy * dy
    if den == 0.0:
        return dist(p, a)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / den
    t = min(1.0, max(0.0, t))
    return math.hypot(ax + t * dx - p[0], ay + t * dy - p[1])


def point_arc_distance(p, arc: Arc) -> float:
    c = arc.circle
    d = dist(p, c.center)
    if d > 0.0 and arc.contains_angle(c.angle_of(p)):
        return abs(d - c.radius)
    return min(dist(p, arc.start), dist(p, arc.end))


# -- smallest enclosing circle -------------------------------------------------

def _diameter_circle(a, b) -> Circle:
    c = Point((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    return Circle(c, max(dist(c, a), dist(c, b)))


def circumcircle(a, b, c) -> Circle | None:
    """Circle through three points, or None when they are collinear."""
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    sa, sb, sc = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    x = ox + (sa * (by - cy) + sb * (cy - ay) + sc * (ay - by)) / d
    y = oy + (sa * (cx - bx) + sb * (ax - cx) + sc * (bx - ax)) / d
    center = Point(x, y)
    return Circle(center, max(dist(center, a), dist(center, b), dist(center, c)))


# Welzl helpers work on plain (x, y) / (cx, cy, r) tuples for speed.

def _inside(c, p) -> bool:
    return math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * (1.0 + _SEC_SLACK) + 1e-300


def _diameter3(a, b):
    cx, cy = (a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0
    return cx, cy, max(math.hypot(cx - a[0], cy - a[1]), math.hypot(cx - b[0], cy - b[1]))


def _circum3(a, b, c):
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    sa, sb, sc = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    x = ox + (sa * (by - cy) + sb * (cy - ay) + sc * (ay - by)) / d
    y = oy + (sa * (cx - bx) + sb * (ax - cx) + sc * (bx - ax)) / d
    return x, y, max(math.hypot(x - a[0], y - a[1]), math.hypot(x - b[0], y - b[1]),
                     math.hypot(x - c[0], y - c[1]))


def _cross3(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _circle_two(points, p, q):
    circ = _diameter3(p, q)
    left = right = None
    for r in points:
        if _inside(circ, r):
            continue
        cr = _cross3(p, q, r)
        c = _circum3(p, q, r)
        if c is None:
            continue
        side = _cross3(p, q, c)
        if cr > 0.0 and (left is None or side > _cross3(p, q, left)):
            left = c
        elif cr < 0.0 and (right is None or side < _cross3(p, q, right)):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right
    if right is None:
        return left
    return left if left[2] <= right[2] else right


def _circle_one(points, p):
    c = (p[0], p[1], 0.0)
    for i, q in enumerate(points):
        if not _inside(c, q):
            if c[2] == 0.0:
                c = _diameter3(p, q)
            else:
                c = _circle_two(points[: i + 1], p, q)
    return c


def sec(points: Iterable) -> Circle:
    """Smallest enclosing circle (incremental move-to-front construction).

    Input is sorted (then shuffled with a fixed seed) so that the result does
    not depend on the order in which points are supplied.
    """
    pts = sorted((float(p[0]), float(p[1])) for p in points)
    if not pts:
        raise GeometryError("empty point set")
    for x, y in pts:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"non-finite coordinate ({x}, {y})")
    # A fixed shuffle of the sorted list: still order-independent, but avoids
    # the quadratic worst case that sorted input triggers.
    random.Random(len(pts)).shuffle(pts)
    c = None
    for i, p in enumerate(pts):
        if c is None or not _inside(c, p):
            c = _circle_one(pts[: i + 1], p)
    return Circle(Point(c[0], c[1]), c[2])


def sec_bruteforce(points: Sequence) -> Circle:
    """Exhaustive smallest enclosing circle; an oracle for :func:`sec`."""
    pts = [Point(*p) for p in points]
    if not pts:
        raise GeometryError("empty point set")
    if len(pts) > 20:
        raise GeometryError("brute force limited to 20 points")
    if len(pts) == 1:
        return Circle(pts[0], 0.0)
    best = None
    candidates = [_diameter_circle(a, b) for a, b in itertools.combinations(pts, 2)]
    candidates += [c for a, b, q in itertools.combinations(pts, 3)
                   if (c := circumcircle(a, b, q)) is not None]
    for c in candidates:
        if best is not None and c.radius >= best.radius:
            continue
        if all(dist(p, c.center) <= c.radius * (1.0 + 1e-12) for p in pts):
            best = c
    return best


# -- tangents, intersections, angles --------------------------------------------

def tangent_points(p, c: Circle) -> tuple[Point, Point]:
    """Points where the two tangents from ``p`` touch ``c``.

    The first point is the one counter-clockwise of the ray center->p.
    """
    d = dist(p, c.center)
    r = c.radius
    if d < r * (1.0 - TAU):
        raise GeometryError("interior point has no tangent")
    alpha = c.angle_of(p) if d > 0.0 else 0.0
    if d <= r:
        t = c.point_at(alpha)
        return t, t
    beta = math.acos(r / d)
    return c.point_at(alpha + beta), c.point_at(alpha - beta)


def segment_intersects_circle(s: Segment, c: Circle) -> bool:
    """True iff the closed segment enters the open disc; grazing does not count."""
    return point_segment_distance(c.center, s.a, s.b) < c.radius * (1.0 - TAU)


def angle_at(vertex, a, b) -> float:
    """Unsigned angle between rays vertex->a and vertex->b, in [0, pi]."""
    scale = max(1.0, abs(vertex[0]), abs(vertex[1]))
    ux, uy = a[0] - vertex[0], a[1] - vertex[1]
    vx, vy = b[0] - vertex[0], b[1] - vertex[1]
    if math.hypot(ux, uy) <= TAU * scale or math.hypot(vx, vy) <= TAU * scale:
        raise GeometryError("degenerate angle")
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def point_on_arc_toward(current, target, circle: Circle, max_step: float) -> Point:
    """Advance along the shorter arc from ``current`` toward ``target``.

    Moves by at most ``max_step`` radians and never overshoots.  Exact
    half-turn ties go counter-clockwise.
    """
    if max_step <= 0.0:
        raise GeometryError("max_step must be positive")
    for q in (current, target):
        if not circle.on_boundary(q):
            raise GeometryError("point is not on the circle")
    a = circle.angle_of(current)
    b = circle.angle_of(target)
    delta = (b - a) % TWO_PI
    if delta > math.pi:
        delta -= TWO_PI
    if abs(delta) <= max_step:
        return Point(*target)
    return circle.point_at(a + math.copysign(max_step, delta))


# -- similarity transforms ------------------------------------------------------

class Similarity(NamedTuple):
    """Map p -> translation + scale * Rot(rotation) * Refl(p).

    ``Refl`` mirrors across the x axis when ``reflected`` is set.
    """

    tx: float = 0.0
    ty: float = 0.0
    rotation: float = 0.0
    reflected: bool = False
    scale: float = 1.0

    def apply(self, p) -> Point:
        x, y = p[0], p[1]
        if self.reflected:
            y = -y
        c = math.cos(self.rotation)
        s = math.sin(self.rotation)
        return Point(self.tx + self.scale * (c * x - s * y),
                     self.ty + self.scale * (s * x + c * y))

    def apply_all(self, points) -> list[Point]:
        c = math.cos(self.rotation) * self.scale
        s = math.sin(self.rotation) * self.scale
        sign = -1.0 if self.reflected else 1.0
        tx, ty = self.tx, self.ty
        return [Point(tx + c * x - s * sign * y, ty + s * x + c * sign * y) for x, y in points]

    def apply_angle(self, angle: float) -> float:
        return ((-angle if self.reflected else angle) + self.rotation) % TWO_PI

    def apply_direction(self, direction: Direction) -> Direction:
        return Direction(-int(direction)) if self.reflected else direction

    def apply_circle(self, c: Circle) -> Circle:
        return Circle(self.apply(c.center), c.radius * self.scale)

    def apply_arc(self, arc: Arc) -> Arc:
        return Arc(self.apply_circle(arc.circle), self.apply_angle(arc.from_angle),
                   self.apply_angle(arc.to_angle), self.apply_direction(arc.direction))

    def inverse(self) -> Similarity:
        k = 1.0 / self.scale
        if self.reflected:
            # F R(-t) = R(t) F, so the inverse keeps the rotation angle.
            c, s = math.cos(self.rotation), math.sin(self.rotation)
            fx, fy = self.tx, -self.ty
            return Similarity(-(c * fx - s * fy) * k, -(s * fx + c * fy) * k,
                              self.rotation, True, k)
        c, s = math.cos(-self.rotation), math.sin(-self.rotation)
        return Similarity(-(c * self.tx - s * self.ty) * k, -(s * self.tx + c * self.ty) * k,
                          -self.rotation, False, k)
