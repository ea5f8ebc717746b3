"""The Compute step: from one snapshot and the target pattern, decide a move.

The computation is global.  Every robot reconstructs the same plan (who moves
and where) from its own snapshot and only acts when it is the chosen mover,
so at most one robot is ever told to move in a given world state.

All reasoning happens in agreed coordinates: the robots' smallest enclosing
circle is the unit circle at the origin, +X points at an anchor robot on
that circle and the Y sign fixes handedness.  In those coordinates the placed
pattern is exactly the normalized pattern.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Sequence

from .agreement import AgreedFrame, PatternSpec, PlacedPattern
from .canon import (
    Configuration,
    NotOrderableError,
    canonical_order,
    compare_signatures,
    polar_signature,
)
from .geom import (
    TAU,
    TWO_PI,
    Arc,
    Circle,
    Direction,
    Point,
    Similarity,
    point_arc_distance,
    point_segment_distance,
    tangent_points,
)

KAPPA = 1e-6                  # path clearance, relative to the SEC radius
ANGLE_STEP = TWO_PI / 1e4     # angular step for ring and detour scans
_ORIGIN = Point(0.0, 0.0)
_UNIT = Circle(_ORIGIN, 1.0)


class ProtocolError(RuntimeError):
    pass


class Milestone(enum.IntEnum):
    I0 = 0
    I1 = 1
    I2 = 2
    DONE = 3


# -- decisions ------------------------------------------------------------------

@dataclass(frozen=True)
class Decision:
    kind: str                   # "Stay", "MoveSegment" or "MoveArc"
    dest: Point | None = None
    arc: Arc | None = None

    @property
    def is_stay(self) -> bool:
        return self.kind == "Stay"

    def transform(self, t: Similarity) -> Decision:
        if self.is_stay:
            return self
        if self.arc is None:
            return Decision(self.kind, t.apply(self.dest))
        arc = t.apply_arc(self.arc)
        return Decision(self.kind, arc.end, arc)


STAY = Decision("Stay")


def move_segment(dest) -> Decision:
    return Decision("MoveSegment", Point(*dest))


def move_arc(arc: Arc) -> Decision:
    return Decision("MoveArc", arc.end, arc)


@dataclass(frozen=True)
class Snapshot:
    robots: Configuration
    self_index: int

    def __post_init__(self):
        if not 0 <= self.self_index < len(self.robots):
            raise ValueError("self_index out of range")

    @classmethod
    def of(cls, points: Sequence, self_index: int) -> Snapshot:
        return cls(Configuration(points), self_index)


# -- context records ------------------------------------------------------------

@dataclass(frozen=True)
class PhaseContext:
    O: Point
    pstar: PlacedPattern
    d: float
    eps: float
    r1_index: int
    p1_index: int
    sec: Circle


@dataclass(frozen=True)
class BoundaryContext:
    robots_on_sec: tuple[int, ...]
    pattern_on_sec: tuple[int, ...]
    filled: tuple[int, ...]


@dataclass(frozen=True)
class RoutePlan:
    d_prime: float
    guard: Circle
    r0: int
    p0: int
    corners: tuple[Point, ...]
    chosen_corner: Point | None
    detour: Point | None
    safe_region: tuple[float, float, float, float] | None   # (r_in, r_out, angle_from, angle_to)


@dataclass(frozen=True)
class Plan:
    """Who moves and how, in the snapshot's coordinates."""

    mover: int | None
    decision: Decision
    milestone: Milestone
    step: str


# -- pattern layout (depends on the pattern only) ---------------------------------

@dataclass(frozen=True)
class PatternLayout:
    points: tuple[Point, ...]
    norms: tuple[float, ...]
    angles: tuple[float, ...]
    rank: tuple[int, ...]
    centre: int | None
    p1: int
    d_prime: float
    d_second: float
    on_sec: tuple[int, ...]


@functools.lru_cache(maxsize=256)
def pattern_layout(pattern: PatternSpec) -> PatternLayout:
    norm = pattern.normalized
    pts = norm.points
    rank = [0] * len(pts)
    for pos, j in enumerate(norm.order.permutation):
        rank[j] = pos
    norms = tuple(math.hypot(*p) for p in pts)
    angles = tuple(math.atan2(p[1], p[0]) % TWO_PI for p in pts)
    centre = next((j for j, r in enumerate(norms) if r <= TAU), None)
    rest = sorted((j for j in range(len(pts)) if j != centre),
                  key=functools.cmp_to_key(lambda a, b: _cmp_tol(norms[a], norms[b]) or rank[a] - rank[b]))
    p1 = rest[0]
    d2 = norms[rest[1]] if len(rest) > 1 else 1.0
    on_sec = tuple(j for j in range(len(pts)) if norms[j] >= 1.0 - TAU)
    return PatternLayout(pts, norms, angles, tuple(rank), centre, p1, norms[p1], d2, on_sec)


def _cmp_tol(a: float, b: float, tol: float = TAU) -> int:
    if abs(a - b) <= tol:
        return 0
    return -1 if a < b else 1


def _max_gap(angles: Sequence[float]) -> float:
    if len(angles) < 2:
        return TWO_PI
    s = sorted(angles)
    gaps = [b - a for a, b in zip(s, s[1:])]
    gaps.append(s[0] + TWO_PI - s[-1])
    return max(gaps)


def _sweep(a: float, b: float, direction: int) -> float:
    return (b - a) % TWO_PI if direction > 0 else (a - b) % TWO_PI


def _unit_arc(a: float, sweep: float, direction: int) -> Arc:
    return Arc(_UNIT, a, (a + direction * sweep) % TWO_PI, Direction(direction))


# -- geodesics around the guard disc ----------------------------------------------

def _clear_of_disc(a, b, radius: float) -> bool:
    return point_segment_distance(_ORIGIN, a, b) >= radius * (1.0 - TAU)


def geodesic(a, b, radius: float) -> tuple[float, int]:
    """Shortest length from ``a`` to ``b`` avoiding the open disc of ``radius``.

    Returns (length, direction) where direction is 0 for a straight segment and
    +1/-1 for wrapping counter-clockwise/clockwise.
    """
    if _clear_of_disc(a, b, radius):
        return math.hypot(b[0] - a[0], b[1] - a[1]), 0
    ra, rb = max(math.hypot(*a), radius), max(math.hypot(*b), radius)
    ta, tb = math.sqrt(max(ra * ra - radius * radius, 0.0)), math.sqrt(max(rb * rb - radius * radius, 0.0))
    wa, wb = math.acos(min(radius / ra, 1.0)), math.acos(min(radius / rb, 1.0))
    tha, thb = math.atan2(a[1], a[0]), math.atan2(b[1], b[0])
    ccw = (thb - tha) % TWO_PI - wa - wb
    cw = (tha - thb) % TWO_PI - wa - wb
    if ccw <= cw:
        return ta + tb + radius * max(ccw, 0.0), 1
    return ta + tb + radius * max(cw, 0.0), -1


def first_leg(a, b, radius: float) -> Decision:
    """First straight or arc piece of the geodesic from ``a`` to ``b``."""
    length, direction = geodesic(a, b, radius)
    if direction == 0:
        return move_segment(b)
    ra = math.hypot(*a)
    rb = math.hypot(*b)
    tha, thb = math.atan2(a[1], a[0]), math.atan2(b[1], b[0])
    wb = math.acos(min(radius / rb, 1.0))
    if ra <= radius * (1.0 + TAU):
        guard = Circle(_ORIGIN, radius)
        end = (thb - direction * wb) % TWO_PI
        return move_arc(Arc(guard, tha % TWO_PI, end, Direction(direction)))
    wa = math.acos(min(radius / ra, 1.0))
    t = tha + direction * wa
    return move_segment(Point(radius * math.cos(t), radius * math.sin(t)))


def corner_route(r0, p0, guard: Circle) -> tuple[tuple[Point, ...], Point | None]:
    """Intersections of the tangent lines from ``r0`` and ``p0``, and the best one.

    A corner is usable when both legs stay off the open guard disc; the best
    usable corner minimizes the two-leg length.  Exact ties go to the corner
    met first counter-clockwise from +X.
    """
    corners: list[Point] = []
    for t in tangent_points(r0, guard):
        for u in tangent_points(p0, guard):
            x = _line_intersection(r0, t, p0, u)
            if x is not None:
                corners.append(x)
    best = None
    for k in corners:
        if not (_clear_of_disc(r0, k, guard.radius) and _clear_of_disc(k, p0, guard.radius)):
            continue
        cost = math.dist(r0, k) + math.dist(k, p0)
        key = (cost, math.atan2(k[1] - guard.center[1], k[0] - guard.center[0]) % TWO_PI)
        if best is None or key[0] < best[0][0] - TAU or (abs(key[0] - best[0][0]) <= TAU and key[1] < best[0][1]):
            best = (key, k)
    return tuple(corners), (best[1] if best else None)


def _line_intersection(p, q, r, s) -> Point | None:
    d1x, d1y = q[0] - p[0], q[1] - p[1]
    d2x, d2y = s[0] - r[0], s[1] - r[1]
    den = d1x * d2y - d1y * d2x
    if abs(den) <= 1e-15 * (math.hypot(d1x, d1y) * math.hypot(d2x, d2y) + 1e-300):
        return None
    t = ((r[0] - p[0]) * d2y - (r[1] - p[1]) * d2x) / den
    return Point(p[0] + t * d1x, p[1] + t * d1y)


# -- assessment of one snapshot ------------------------------------------------------

class Assessment:
    """Everything the protocol derives from one snapshot.

    ``a`` holds robot positions in agreed coordinates (SEC is the unit circle,
    +X points at the anchor).  An instance is built from the snapshot alone.
    """

    def __init__(self, points: Sequence | Configuration, pattern: PatternSpec):
        self.config = points if isinstance(points, Configuration) else Configuration(points)
        if len(self.config) != len(pattern):
            raise ProtocolError("pattern/robot cardinality mismatch")
        self.pattern = pattern
        self.layout = pattern_layout(pattern)
        if self.layout.d_prime >= 1.0 - TAU:
            raise ProtocolError("pattern has no point strictly inside its SEC")
        self.n = len(self.config)
        circle = self.config.circle
        self.O, self.R = circle.center, circle.radius
        if self.R <= 0.0:
            raise ProtocolError("robots occupy a single point")
        ox, oy, R = self.O.x, self.O.y, self.R
        self._u = [((p.x - ox) / R, (p.y - oy) / R) for p in self.config.points]
        self.norms = [math.hypot(x, y) for x, y in self._u]
        self.centre_robot = next((i for i, r in enumerate(self.norms) if r <= TAU), None)
        self._canon = None
        self.unpin: tuple[int, int, float] | None = None
        self.r1 = self._pick_r1()
        self._select_frame()
        self._match()

    # ordering helpers

    def canonical_rank(self) -> list[int]:
        if self._canon is None:
            try:
                perm = canonical_order(self.config).permutation
            except NotOrderableError as exc:
                raise ProtocolError("configuration not orderable") from exc
            rank = [0] * self.n
            for pos, i in enumerate(perm):
                rank[i] = pos
            self._canon = rank
        return self._canon

    def _pick_r1(self) -> int:
        cands = [i for i in range(self.n) if i != self.centre_robot]
        best = min(self.norms[i] for i in cands)
        tied = [i for i in cands if self.norms[i] <= best + TAU]
        if best >= 1.0 - TAU:
            # Every robot sits on the SEC: only one whose departure keeps the
            # circle may go inward.
            angles = [math.atan2(y, x) for x, y in self._u]
            free = [i for i in tied
                    if _max_gap([angles[k] for k in cands if k != i]) <= math.pi + TAU]
            if not free:
                return self._unpin(cands, angles)
            tied = free
        if len(tied) == 1:
            return tied[0]
        rank = self.canonical_rank()
        return min(tied, key=rank.__getitem__)

    def _unpin(self, cands: list[int], angles: list[float]) -> int:
        """Three robots pin the SEC: plan to slide one until two are diametral.

        The robot facing the widest gap is freed; of the two robots bounding
        that gap, the one with the narrower gap toward the freed robot slides
        toward it.  Both choices persist while the slide is under way.
        """
        if len(cands) != 3:
            raise ProtocolError("every robot is pinned to the SEC")
        order = sorted(cands, key=lambda i: angles[i] % TWO_PI)
        gaps = [((angles[order[(k + 1) % 3]] - angles[order[k]]) % TWO_PI, k) for k in range(3)]
        wide, k = max(gaps)
        a, b, c = order[k], order[(k + 1) % 3], order[(k + 2) % 3]
        gap_ca = (angles[a] - angles[c]) % TWO_PI
        gap_bc = (angles[c] - angles[b]) % TWO_PI
        # sliding a clockwise (toward c) widens the a-b gap; likewise b counter-clockwise
        mover, direction = (a, -1) if gap_ca <= gap_bc else (b, 1)
        self.unpin = (mover, direction, math.pi - wide)
        return c

    def _select_frame(self) -> None:
        lay = self.layout
        pts = lay.points
        target = pts[lay.p1]
        # radii do not depend on the frame, so only these pairs can ever coincide
        pairs = [(i, j) for j, pn in enumerate(lay.norms) for i, rn in enumerate(self.norms)
                 if abs(rn - pn) <= TAU]
        cands = []
        for b in range(self.n):
            if b == self.r1 or self.norms[b] < 1.0 - TAU:
                continue
            bx, by = self._u[b]
            nb = self.norms[b]
            c, s = bx / nb, -by / nb
            rot = [(c * x - s * y, s * x + c * y) for x, y in self._u]
            for chi in (1, -1):
                a = rot if chi == 1 else [(x, -y) for x, y in rot]
                hit = set()
                for i, j in pairs:
                    x, y = a[i]
                    px, py = pts[j]
                    if abs(x - px) <= TAU and abs(y - py) <= TAU and math.hypot(x - px, y - py) <= TAU:
                        hit.add(j)
                score = len(hit)
                rx, ry = a[self.r1]
                cands.append((-score, math.hypot(rx - target[0], ry - target[1]), b, chi, a))
        if not cands:
            raise ProtocolError("no anchor on the SEC")
        top = min(c[0] for c in cands)
        cands = [c for c in cands if c[0] == top]
        near = min(c[1] for c in cands)
        cands = [c for c in cands if c[1] <= near + TAU]
        if len(cands) > 1:
            sigs = [(polar_signature(self.config, c[2], Direction(c[3])), c) for c in cands]
            sigs.sort(key=functools.cmp_to_key(lambda u, v: compare_signatures(u[0], v[0])))
            if compare_signatures(sigs[0][0], sigs[1][0]) == 0:
                raise ProtocolError("configuration not orderable")
            cands = [sigs[0][1]]
        _, _, b, chi, a = cands[0]
        self.anchor, self.chirality = b, chi
        self.a = [Point(x, y) for x, y in a]
        self.frame = AgreedFrame.through(self.O, self.config.points[b], chi)
        self.to_snapshot = self.frame.to_snapshot

    def _match(self) -> None:
        pts = self.layout.points
        self.robot_at: list[int | None] = [None] * len(pts)
        self.point_of: list[int | None] = [None] * self.n
        for j, (px, py) in enumerate(pts):
            for i, (x, y) in enumerate(self.a):
                if self.point_of[i] is None and abs(x - px) <= TAU and abs(y - py) <= TAU \
                        and math.hypot(x - px, y - py) <= TAU:
                    self.robot_at[j] = i
                    self.point_of[i] = j
                    break

    # derived quantities

    @functools.cached_property
    def milestone(self) -> Milestone:
        lay = self.layout
        if all(i is not None for i in self.robot_at):
            return Milestone.DONE
        if lay.centre is None:
            centre_ok = self.centre_robot is None
        else:
            centre_ok = self.centre_robot is not None
        if not (centre_ok and self.robot_at[lay.p1] == self.r1):
            return Milestone.I0
        if all(self.robot_at[j] is not None for j in lay.on_sec):
            return Milestone.I2
        return Milestone.I1

    @property
    def placed(self) -> PlacedPattern:
        pts = tuple(self.to_snapshot.apply_all(self.layout.points))
        return PlacedPattern(pts, self.pattern.normalized.order, self.frame)

    def eps(self, d: float) -> float:
        lay = self.layout
        e = min(1.0 - d, lay.d_second - lay.d_prime) / 4.0
        if e <= TAU:
            raise ProtocolError("degenerate pattern: no room for the guard ring")
        return e

    @property
    def guard_radius(self) -> float:
        d = self.layout.d_prime
        return d + self.eps(d) / 2.0

    def phase_context(self) -> PhaseContext:
        lay = self.layout
        d = max(self.norms[self.r1], lay.d_prime)
        e = self.eps(d) if d < 1.0 - TAU else 0.0
        return PhaseContext(self.O, self.placed, d * self.R, e * self.R, self.r1, lay.p1,
                            self.config.circle)

    @functools.cached_property
    def order_rank(self) -> list[int]:
        """Rank of each robot by agreed angle from +X, then radius."""
        keys = [(math.atan2(y, x) % TWO_PI, math.hypot(x, y)) for x, y in self.a]
        for i, (t, r) in enumerate(keys):
            if r <= TAU or t > TWO_PI - TAU:
                keys[i] = (0.0, r)

        def cmp(i, j):
            return _cmp_tol(keys[i][0], keys[j][0]) or _cmp_tol(keys[i][1], keys[j][1]) or i - j

        rank = [0] * self.n
        for pos, i in enumerate(sorted(range(self.n), key=functools.cmp_to_key(cmp))):
            rank[i] = pos
        return rank

    def on_sec(self, i: int) -> bool:
        return self.norms[i] >= 1.0 - TAU

    def angle(self, i: int) -> float:
        x, y = self.a[i]
        return math.atan2(y, x) % TWO_PI

    def boundary_context(self) -> BoundaryContext:
        lay = self.layout
        robots = tuple(i for i in range(self.n) if self.on_sec(i))
        filled = tuple(j for j in lay.on_sec if self.robot_at[j] is not None)
        return BoundaryContext(robots, lay.on_sec, filled)

    def free_robots(self) -> list[int]:
        return [i for i in range(self.n) if self.point_of[i] is None]

    def free_points(self) -> list[int]:
        return [j for j, i in enumerate(self.robot_at) if i is None]

    def locked(self) -> bool:
        """Filled boundary pattern points alone pin the SEC."""
        lay = self.layout
        filled = [lay.angles[j] for j in lay.on_sec if self.robot_at[j] is not None]
        return len(filled) >= 2 and _max_gap(filled) <= math.pi + TAU

    def clear_segment(self, a, b, mover: int) -> bool:
        for k, q in enumerate(self.a):
            if k != mover and point_segment_distance(q, a, b) < KAPPA:
                return False
        return True

    def clear_arc(self, arc: Arc, mover: int) -> bool:
        for k, q in enumerate(self.a):
            if k != mover and point_arc_distance(q, arc) < KAPPA:
                return False
        return True

    def to_plan(self, mover: int | None, decision: Decision, step: str) -> Plan:
        if mover is None:
            return Plan(None, STAY, self.milestone, step)
        return Plan(mover, decision.transform(self.to_snapshot), self.milestone, step)


# -- steps before r1 settles ----------------------------------------------------------

def _vacate_centre(s: Assessment) -> tuple[int, Decision]:
    c = s.centre_robot
    d0 = min(math.dist(s.a[c], q) for k, q in enumerate(s.a) if k != c)
    x, y = s.a[c]
    return c, move_segment(Point(x + d0 / 2.0, y))


def _ring_radius(s: Assessment) -> float | None:
    """Radius of the clearing ring, or None when r1 already sits on the SEC."""
    d = max(s.norms[s.r1], s.layout.d_prime)
    if d >= 1.0 - TAU:
        return None
    return d + s.eps(d)


def _inside_ring(s: Assessment, ring: float) -> list[int]:
    return [i for i in range(s.n)
            if i != s.r1 and i != s.centre_robot and s.norms[i] < ring - TAU]


def _radially_out(s: Assessment, ring: float, inside: list[int]) -> tuple[int, Decision]:
    far = max(s.norms[i] for i in inside)
    tied = [i for i in inside if s.norms[i] >= far - TAU]
    mover = min(tied, key=s.order_rank.__getitem__)
    rx, ry = s.a[mover]
    base = math.atan2(ry, rx)
    clearance = ring * ANGLE_STEP / 2.0

    def free(p) -> bool:
        return all(math.dist(p, q) > clearance for k, q in enumerate(s.a) if k != mover)

    h = Point(ring * math.cos(base), ring * math.sin(base))
    if free(h):
        return mover, move_segment(h)
    k = 1
    while k * ANGLE_STEP < math.pi:
        ok_side = False
        for sign in (1, -1):
            t = base + sign * k * ANGLE_STEP
            g = Point(ring * math.cos(t), ring * math.sin(t))
            # the angle at the mover between g and h may not exceed a right angle
            if (g.x - rx) * (h.x - rx) + (g.y - ry) * (h.y - ry) < 0.0:
                continue
            ok_side = True
            if free(g) and s.clear_segment(s.a[mover], g, mover):
                return mover, move_segment(g)
        if not ok_side:
            break
        k += 1
    raise ProtocolError("no free point on the ring")


# -- after r1 settles ------------------------------------------------------------------

def _route(s: Assessment, movers: list[int], targets: list[int]) -> tuple[int, int, Decision]:
    """Pick the closest (robot, point) pair around the guard and its first leg."""
    if not movers or not targets:
        raise ProtocolError("nothing to place")
    g = s.guard_radius
    pts = s.layout.points
    rank = s.order_rank
    prank = s.layout.rank
    rows = []
    for i in movers:
        if s.norms[i] < g * (1.0 - TAU):
            raise ProtocolError("free robot inside the guard")
        a = s.a[i]
        ta = math.atan2(a[1], a[0])
        for j in targets:
            length, _ = geodesic(a, pts[j], g)
            turn = abs((s.layout.angles[j] - ta + math.pi) % TWO_PI - math.pi)
            rows.append((length, s.norms[i], turn, rank[i], prank[j], i, j))

    def cmp(u, v):
        return (_cmp_tol(u[0], v[0]) or _cmp_tol(u[1], v[1]) or _cmp_tol(u[2], v[2])
                or u[3] - v[3] or u[4] - v[4])

    row = min(rows, key=functools.cmp_to_key(cmp))
    i, j = row[5], row[6]
    leg = first_leg(s.a[i], pts[j], g)
    if _leg_clear(s, i, leg):
        return i, j, leg
    return i, j, _detour(s, i, j, g)


def _leg_clear(s: Assessment, mover: int, leg: Decision) -> bool:
    if leg.arc is not None:
        return s.clear_arc(leg.arc, mover)
    return s.clear_segment(s.a[mover], leg.dest, mover)


def safe_region(s: Assessment, i: int, j: int, g: float) -> tuple[float, float, float, float]:
    """Annular sector between the guard and the SEC, spanning rays O->r0 and O->p0."""
    a0 = s.angle(i)
    a1 = s.layout.angles[j]
    return g, 1.0, a0, a1


def _detour(s: Assessment, i: int, j: int, g: float) -> Decision:
    _, _, a0, a1 = safe_region(s, i, j, g)
    turn = (a1 - a0 + math.pi) % TWO_PI - math.pi
    step = math.copysign(ANGLE_STEP, turn) if turn else ANGLE_STEP
    radius = (g + 1.0) / 2.0
    t = a0 + turn / 2.0
    start = s.a[i]
    for _ in range(int(1e4)):
        d0 = Point(radius * math.cos(t), radius * math.sin(t))
        if _clear_of_disc(start, d0, g) and s.clear_segment(start, d0, i):
            return move_segment(d0)
        t += step
    raise ProtocolError("no safe detour")


def _filled_angles(s: Assessment) -> list[float]:
    lay = s.layout
    return [lay.angles[j] for j in lay.on_sec if s.robot_at[j] is not None]


def _strictly_between(a: float, sweep: float, direction: int, angles, tol: float) -> bool:
    for t in angles:
        off = _sweep(a, t, direction)
        if tol < off < sweep - tol:
            return True
    return False


def alternate(free_robot_angles, free_point_angles, filled_angles) -> bool:
    """Some free robot sees some free boundary point along an arc with no filled point."""
    for a in free_robot_angles:
        for p in free_point_angles:
            for direction in (1, -1):
                sweep = _sweep(a, p, direction)
                if not _strictly_between(a, sweep, direction, filled_angles, TAU):
                    return True
    return False


class _Boundary:
    """The boundary picture used by the arc moves (angles in agreed coordinates)."""

    def __init__(self, s: Assessment):
        lay = s.layout
        self.s = s
        self.robots = [i for i in range(s.n) if s.on_sec(i)]
        self.robot_angle = {i: s.angle(i) for i in self.robots}
        self.free_robots = [i for i in self.robots if s.point_of[i] is None]
        self.free_points = [j for j in lay.on_sec if s.robot_at[j] is None]
        self.filled = [j for j in lay.on_sec if s.robot_at[j] is not None]
        self.tol = KAPPA

    def moves(self, targets=None):
        """Unblocked, SEC-preserving arc moves as (sweep, rank, prank, i, j, direction)."""
        lay = self.s.layout
        out = []
        for i in self.free_robots:
            a = self.robot_angle[i]
            others = [self.robot_angle[k] for k in self.robots if k != i]
            for j in (targets if targets is not None else self.free_points):
                p = lay.angles[j]
                if _max_gap(others + [p]) > math.pi + TAU:
                    continue
                for direction in (1, -1):
                    sweep = _sweep(a, p, direction)
                    if _strictly_between(a, sweep, direction, others, self.tol):
                        continue
                    out.append((sweep, self.s.order_rank[i], lay.rank[j], i, j, direction))
        out.sort(key=functools.cmp_to_key(
            lambda u, v: _cmp_tol(u[0], v[0]) or u[1] - v[1] or u[2] - v[2] or v[5] - u[5]))
        return out

    def is_alternate(self) -> bool:
        lay = self.s.layout
        return alternate([self.robot_angle[i] for i in self.free_robots],
                         [lay.angles[j] for j in self.free_points],
                         [lay.angles[j] for j in self.filled])

    def alternate_after(self, i: int, j: int) -> bool:
        lay = self.s.layout
        free_points = [lay.angles[k] for k in self.free_points if k != j]
        if not free_points:
            return True
        filled = [lay.angles[k] for k in self.filled] + [lay.angles[j]]
        if _max_gap(filled) <= math.pi + TAU:
            return True
        return alternate([self.robot_angle[k] for k in self.free_robots if k != i],
                         free_points, filled)

    def decision(self, move) -> tuple[int, Decision]:
        sweep, _, _, i, j, direction = move
        arc = _unit_arc(self.robot_angle[i], sweep, direction)
        arc = Arc(_UNIT, arc.from_angle, self.s.layout.angles[j], arc.direction)
        return i, move_arc(arc)


def _ensuring_alternate(b: _Boundary) -> tuple[int, Decision]:
    for m in b.moves():
        if b.alternate_after(m[3], m[4]):
            return b.decision(m)
    raise ProtocolError("alternate unreachable")


def _generate_alternate(b: _Boundary) -> tuple[int, Decision]:
    s = b.s
    lay = s.layout
    filled_robots = [s.robot_at[j] for j in b.filled]
    best = None
    for x in filled_robots:
        if x == s.anchor:
            continue
        ax = b.robot_angle[x]
        for j in b.free_points:
            turn = (lay.angles[j] - ax + math.pi) % TWO_PI - math.pi
            key = (abs(turn), lay.rank[j])
            if best is None or key < best[0]:
                best = (key, x, j, 1 if turn >= 0 else -1)
    if best is None:
        raise ProtocolError("alternate unreachable")
    _, x, j, direction = best
    ax = b.robot_angle[x]
    features = [b.robot_angle[k] for k in b.robots if k != x]
    features += [lay.angles[k] for k in lay.on_sec if s.robot_at[k] != x]
    gap = min((g for g in (_sweep(ax, t, direction) for t in features) if g > TAU), default=math.pi)
    return x, move_arc(_unit_arc(ax, gap / 2.0, direction))


def _on_boundary(s: Assessment) -> tuple[int, Decision]:
    b = _Boundary(s)
    lay = s.layout
    filled = b.filled
    if len(filled) == 1:
        fa = lay.angles[filled[0]]
        opposite = [j for j in b.free_points
                    if abs(abs((lay.angles[j] - fa + math.pi) % TWO_PI - math.pi) - math.pi) <= TAU]
        moves = b.moves(opposite) if opposite else []
        if moves:
            return b.decision(moves[0])
        return _ensuring_alternate(b)
    if len(filled) != 2 or b.is_alternate():
        moves = b.moves()
        if not moves:
            raise ProtocolError("no boundary move")
        return b.decision(moves[0])
    return _generate_alternate(b)


# -- the full case tree ------------------------------------------------------------------

def plan(points: Sequence | Configuration, pattern: PatternSpec) -> Plan:
    """The mover and its decision for this snapshot (snapshot coordinates)."""
    s = Assessment(points, pattern)
    return _plan(s)


def _plan(s: Assessment) -> Plan:
    lay = s.layout
    ms = s.milestone
    if ms is Milestone.DONE:
        return s.to_plan(None, STAY, "done")
    if ms is Milestone.I0:
        if lay.centre is None and s.centre_robot is not None:
            return s.to_plan(*_vacate_centre(s), "vacate-centre")
        if lay.centre is not None and s.centre_robot is None:
            return s.to_plan(s.r1, move_segment(_ORIGIN), "fill-centre")
        if s.unpin is not None:
            mover, direction, sweep = s.unpin
            return s.to_plan(mover, move_arc(_unit_arc(s.angle(mover), sweep, direction)), "unpin")
        ring = _ring_radius(s)
        if ring is not None:
            inside = _inside_ring(s, ring)
            if inside:
                return s.to_plan(*_radially_out(s, ring, inside), "radially-out")
        return s.to_plan(s.r1, move_segment(lay.points[lay.p1]), "settle-r1")
    free = s.free_robots()
    free_pts = s.free_points()
    free_sec = [j for j in lay.on_sec if s.robot_at[j] is None]
    if not free_sec:
        i, _, dec = _route(s, free, free_pts)
        return s.to_plan(i, dec, "to-destination")
    interior = [i for i in free if not s.on_sec(i)]
    if interior or s.locked():
        movers = interior + ([i for i in free if s.on_sec(i)] if s.locked() else [])
        i, _, dec = _route(s, movers, free_sec)
        return s.to_plan(i, dec, "fill-sec")
    return s.to_plan(*_on_boundary(s), "on-boundary")


# -- per-robot entry points ---------------------------------------------------------------

def _snapshot(snapshot: Snapshot | Sequence) -> tuple[Configuration, int | None]:
    if isinstance(snapshot, Snapshot):
        return snapshot.robots, snapshot.self_index
    return Configuration(snapshot), None


def _for_self(s: Assessment, self_index: int | None, mover: int, decision: Decision) -> Decision:
    if self_index is not None and self_index != mover:
        return STAY
    return decision.transform(s.to_snapshot)


def pattern_formation(snapshot: Snapshot, pattern: PatternSpec) -> Decision:
    """The decision for ``snapshot.self_index``: its move if it is the mover, else Stay."""
    p = plan(snapshot.robots, pattern)
    return p.decision if p.mover == snapshot.self_index else STAY


def classify_milestone(snapshot: Snapshot | Sequence, pattern: PatternSpec) -> Milestone:
    return Assessment(_snapshot(snapshot)[0], pattern).milestone


def move_radially_out(snapshot: Snapshot | Sequence, pattern: PatternSpec) -> Decision:
    c, me = _snapshot(snapshot)
    s = Assessment(c, pattern)
    ring = _ring_radius(s)
    inside = _inside_ring(s, ring) if ring is not None else []
    if not inside:
        return STAY
    return _for_self(s, me, *_radially_out(s, ring, inside))


def move_to_destination(snapshot: Snapshot | Sequence, pattern: PatternSpec,
                        route: str = "geodesic") -> Decision:
    """Send the closest free robot toward the closest free pattern point.

    ``route="corner"`` follows the tangent-corner construction instead of the
    default shortest path around the guard disc.
    """
    c, me = _snapshot(snapshot)
    s = Assessment(c, pattern)
    i, j, dec = _route(s, s.free_robots(), s.free_points())
    if route == "corner":
        rp = plan_route(s, i, j)
        if rp.detour is not None:
            dec = move_segment(rp.detour)
        elif rp.chosen_corner is not None:
            dec = move_segment(rp.chosen_corner)
        else:
            dec = move_segment(s.layout.points[j])
    elif route != "geodesic":
        raise ValueError(f"unknown route mode {route!r}")
    return _for_self(s, me, i, dec)


def plan_route(s: Assessment, r0: int, p0: int) -> RoutePlan:
    """Tangent-corner route for robot ``r0`` to pattern point ``p0`` (agreed coordinates)."""
    g = s.guard_radius
    guard = Circle(_ORIGIN, g)
    a, b = s.a[r0], s.layout.points[p0]
    if _clear_of_disc(a, b, g):
        corners, corner = (), None
        blocked = not s.clear_segment(a, b, r0)
    else:
        corners, corner = corner_route(a, b, guard)
        blocked = corner is None or not s.clear_segment(a, corner, r0)
    detour = None
    if blocked:
        detour = _detour(s, r0, p0, g).dest
    return RoutePlan(s.layout.d_prime, guard, r0, p0, corners, corner, detour,
                     safe_region(s, r0, p0, g))


def is_alternate(snapshot: Snapshot | Sequence, pattern: PatternSpec) -> bool:
    return _Boundary(Assessment(_snapshot(snapshot)[0], pattern)).is_alternate()


def move_on_boundary(snapshot: Snapshot | Sequence, pattern: PatternSpec) -> Decision:
    c, me = _snapshot(snapshot)
    s = Assessment(c, pattern)
    return _for_self(s, me, *_on_boundary(s))


def move_ensuring_alternate(snapshot: Snapshot | Sequence, pattern: PatternSpec) -> Decision:
    c, me = _snapshot(snapshot)
    s = Assessment(c, pattern)
    return _for_self(s, me, *_ensuring_alternate(_Boundary(s)))


def generate_alternate(snapshot: Snapshot | Sequence, pattern: PatternSpec) -> Decision:
    c, me = _snapshot(snapshot)
    s = Assessment(c, pattern)
    return _for_self(s, me, *_generate_alternate(_Boundary(s)))
