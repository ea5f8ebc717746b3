"""Symmetry classification, similarity-invariant ordering and leader election.

A point set is *orderable* when its symmetry group is trivial: no mirror line
and no non-trivial rotation maps it onto itself.  For such sets the polar
signature read from every (boundary start point, chirality) pair is distinct,
so the lexicographically smallest one picks a unique start point and sweep
direction.  Everything downstream (leader, second reference, agreed axes)
derives from that choice.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .geom import TAU, TWO_PI, Circle, Direction, Point, dist, sec


class ConfigurationError(ValueError):
    pass


class NotOrderableError(ConfigurationError):
    pass


@dataclass(frozen=True)
class Configuration:
    """Pairwise distinct, finite points (robots or pattern points)."""

    points: tuple[Point, ...]
    circle: Circle = field(init=False, repr=False, compare=False)

    def __init__(self, points: Sequence):
        pts = tuple(p if type(p) is Point else Point(*p) for p in points)
        if not pts:
            raise ConfigurationError("empty point set")
        circle = sec(pts)
        tol = TAU * max(circle.radius, 1e-300)
        for i, (ax, ay) in enumerate(pts):
            for bx, by in pts[i + 1:]:
                if abs(ax - bx) <= tol and abs(ay - by) <= tol and math.hypot(ax - bx, ay - by) <= tol:
                    raise ConfigurationError(f"points {(ax, ay)} and {(bx, by)} coincide")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "circle", circle)

    def __len__(self) -> int:
        return len(self.points)

    def on_boundary(self, i: int) -> bool:
        return self.circle.on_boundary(self.points[i])

    def boundary_indices(self) -> list[int]:
        return [i for i in range(len(self.points)) if self.on_boundary(i)]


@dataclass(frozen=True)
class SymmetryReport:
    has_mirror: bool
    has_rotational: bool
    mirror_line: tuple[Point, float] | None = None   # (point on line, direction angle)
    rotation: float | None = None                    # smallest self-mapping rotation angle

    @property
    def witness(self):
        return self.mirror_line if self.has_mirror else self.rotation

    @property
    def trivial(self) -> bool:
        return not (self.has_mirror or self.has_rotational)


@dataclass(frozen=True)
class PolarSignature:
    entries: tuple[tuple[float, float], ...]   # (radius ratio, turn angle)
    order: tuple[int, ...]


@dataclass(frozen=True)
class CanonicalOrder:
    permutation: tuple[int, ...]
    start_point_index: int
    chirality: Direction


def _matches(image: Sequence, points: Sequence, tol: float) -> bool:
    used = [False] * len(points)
    for q in image:
        for j, p in enumerate(points):
            if not used[j] and abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol \
                    and dist(p, q) <= tol:
                used[j] = True
                break
        else:
            return False
    return True


def _symmetry_tol(c: Configuration) -> float:
    # A bit looser than TAU: transformed images carry rounding from trig.
    return 10.0 * TAU * max(c.circle.radius, 1e-300)


def reflect_across(p, origin, axis_angle: float) -> Point:
    ux, uy = math.cos(axis_angle), math.sin(axis_angle)
    dx, dy = p[0] - origin[0], p[1] - origin[1]
    k = 2.0 * (dx * ux + dy * uy)
    return Point(origin[0] + k * ux - dx, origin[1] + k * uy - dy)


def rotate_about(p, origin, angle: float) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = p[0] - origin[0], p[1] - origin[1]
    return Point(origin[0] + c * dx - s * dy, origin[1] + s * dx + c * dy)


def symmetry_report(c: Configuration) -> SymmetryReport:
    pts = c.points
    o = c.circle.center
    if len(pts) == 1:
        return SymmetryReport(True, True, (pts[0], 0.0), math.pi)
    tol = _symmetry_tol(c)
    far = [p for p in pts if dist(p, o) > tol]

    axes = [math.atan2(p[1] - o[1], p[0] - o[0]) for p in far]
    axes += [math.atan2(a[0] - b[0], b[1] - a[1]) for a, b in itertools.combinations(pts, 2)]
    mirror = None
    for ax in axes:
        if _matches([reflect_across(p, o, ax) for p in pts], pts, tol):
            mirror = (o, ax % math.pi)
            break

    rotation = None
    boundary = [p for p in pts if c.circle.on_boundary(p)]
    b0 = boundary[0]
    a0 = c.circle.angle_of(b0)
    for angle in sorted((c.circle.angle_of(b) - a0) % TWO_PI for b in boundary[1:]):
        if angle <= TAU:
            continue
        if _matches([rotate_about(p, o, angle) for p in pts], pts, tol):
            rotation = angle
            break
    return SymmetryReport(mirror is not None, rotation is not None, mirror, rotation)


def _sweep_angle(c: Configuration, start: Point, p: Point, chirality: Direction) -> float:
    circ = c.circle
    if dist(p, circ.center) <= TAU * max(circ.radius, 1e-300):
        return 0.0
    a = (circ.angle_of(p) - circ.angle_of(start)) % TWO_PI
    if chirality is Direction.CW:
        a = (-a) % TWO_PI
    if a > TWO_PI - TAU:
        a = 0.0
    return a


def polar_signature(c: Configuration, start: int, chirality: Direction) -> PolarSignature:
    circ = c.circle
    if not c.on_boundary(start):
        raise ConfigurationError("start point is not on the SEC boundary")
    s = c.points[start]
    r = circ.radius
    rows = []
    for i, p in enumerate(c.points):
        ratio = dist(p, circ.center) / r if r > 0.0 else 0.0
        angle = 0.0 if i == start else _sweep_angle(c, s, p, chirality)
        rows.append((angle, ratio, i))

    def cmp(u, v):
        if abs(u[0] - v[0]) > TAU:
            return -1 if u[0] < v[0] else 1
        if abs(u[1] - v[1]) > TAU:
            return -1 if u[1] > v[1] else 1
        return 0

    rows.sort(key=functools.cmp_to_key(cmp))
    # keep the start point first even if something rounds to angle 0 with it
    rows.sort(key=lambda row: row[2] != start)
    return PolarSignature(tuple((ratio, angle) for angle, ratio, _ in rows),
                          tuple(i for _, _, i in rows))


def compare_signatures(a: PolarSignature, b: PolarSignature, tol: float = TAU) -> int:
    """Lexicographic comparison with a tolerance; 0 means indistinguishable."""
    for (ra, ta), (rb, tb) in zip(a.entries, b.entries):
        if abs(ra - rb) > tol:
            return -1 if ra < rb else 1
        if abs(ta - tb) > tol:
            return -1 if ta < tb else 1
    return (len(a.entries) > len(b.entries)) - (len(a.entries) < len(b.entries))


def ranked_starts(c: Configuration) -> list[tuple[PolarSignature, int, Direction]]:
    """Every (signature, start, chirality) candidate, smallest signature first."""
    cands = [(polar_signature(c, i, d), i, d)
             for i in c.boundary_indices() for d in (Direction.CCW, Direction.CW)]
    cands.sort(key=functools.cmp_to_key(lambda u, v: compare_signatures(u[0], v[0])))
    return cands


def canonical_order(c: Configuration) -> CanonicalOrder:
    if not symmetry_report(c).trivial:
        raise NotOrderableError("configuration not orderable")
    cands = ranked_starts(c)
    if len(cands) > 1 and compare_signatures(cands[0][0], cands[1][0]) == 0:
        raise NotOrderableError("configuration too close to symmetric")
    sig, start, chirality = cands[0]
    return CanonicalOrder(sig.order, start, chirality)


def elect_leader(c: Configuration) -> int:
    return canonical_order(c).start_point_index


def second_reference(c: Configuration, leader: int) -> int:
    """First point after the leader, in canonical order, off the centre-leader line."""
    n = len(c)
    if n < 2:
        raise ConfigurationError("no off-axis reference")
    try:
        perm = canonical_order(c).permutation
    except NotOrderableError:
        perm = tuple(range(n))
    o = c.circle.center
    lp = c.points[leader]
    ux, uy = lp[0] - o[0], lp[1] - o[1]
    norm = math.hypot(ux, uy)
    tol = TAU * max(c.circle.radius, 1e-300)
    pos = perm.index(leader)
    for k in range(1, n):
        i = perm[(pos + k) % n]
        p = c.points[i]
        if norm == 0.0:
            off = dist(p, o)
        else:
            off = abs(ux * (p[1] - o[1]) - uy * (p[0] - o[0])) / norm
        if off > tol:
            return i
    raise ConfigurationError("no off-axis reference")
