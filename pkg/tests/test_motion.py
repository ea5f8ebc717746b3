import math
import random

import pytest

from asymform.agreement import PatternSpec
from asymform.canon import Configuration
from asymform.geom import TAU, Circle, Direction, Point, point_segment_distance
from asymform.motion import (
    ANGLE_STEP, KAPPA, STAY, Assessment, Milestone, ProtocolError, Snapshot, alternate,
    classify_milestone, corner_route, first_leg, generate_alternate, geodesic, is_alternate,
    move_ensuring_alternate, move_on_boundary, move_radially_out, move_to_destination,
    pattern_formation, plan, plan_route,
)

from conftest import asymmetric, random_similarity

TWO_PI = 2 * math.pi


def polar(r, t):
    return Point(r * math.cos(t), r * math.sin(t))


# Normalizes to itself: SEC is the unit circle and (1, 0) is the leader.
# Boundary angles 0, pi, 2.2, 4.0; interior radii 0.3, 0.55, 0.7.
PATTERN = PatternSpec([polar(1, 0), polar(1, math.pi), polar(1, 2.2), polar(1, 4.0),
                       polar(0.3, 1.0), polar(0.55, 2.5), polar(0.7, 5.0)])
INTERIOR = [polar(0.3, 1.0), polar(0.55, 2.5), polar(0.7, 5.0)]


def test_pattern_fixture_is_normalized():
    for p, q in zip(PATTERN.normalized.points, PATTERN.points.points):
        assert math.dist(p, q) < 1e-12


def agreed(s: Assessment, p):
    return s.to_snapshot.inverse().apply(p)


def assert_identity_frame(s: Assessment, anchor: int):
    assert s.anchor == anchor and s.chirality == 1


# -- milestones ------------------------------------------------------------------

def test_done_state_all_stay():
    rng = random.Random(1)
    t = random_similarity(rng)
    robots = [t.apply(p) for p in reversed(PATTERN.points.points)]
    assert classify_milestone(robots, PATTERN) is Milestone.DONE
    for i in range(len(robots)):
        assert pattern_formation(Snapshot.of(robots, i), PATTERN) == STAY


def test_fresh_random_is_I0():
    for seed in range(5):
        robots = asymmetric(7, seed)
        s = Assessment(robots, PATTERN)
        placed = s.placed.points
        # oracle: r1 does not sit on its pattern point
        if math.dist(robots[s.r1], placed[s.layout.p1]) > 1e-6:
            assert s.milestone is Milestone.I0


def test_I1_when_r1_settled_and_boundary_point_free():
    robots = INTERIOR + [polar(1, 0), polar(1, math.pi), polar(1, 2.2), polar(0.8, 4.5)]
    s = Assessment(robots, PATTERN)
    assert_identity_frame(s, 3)
    assert s.milestone is Milestone.I1
    assert s.r1 == 0


def test_I2_when_every_boundary_point_filled():
    robots = INTERIOR[:2] + [polar(0.8, 5.5), polar(1, 0), polar(1, math.pi), polar(1, 2.2), polar(1, 4.0)]
    assert classify_milestone(robots, PATTERN) is Milestone.I2


def test_pattern_without_interior_point_is_rejected():
    tri = PatternSpec([(0, 0), (3, 0.2), (1.1, 2)])
    with pytest.raises(ProtocolError, match="strictly inside"):
        plan(asymmetric(3, 0), tri)


# -- steps before r1 settles ----------------------------------------------------

def test_vacate_centre_moves_half_the_nearest_distance():
    robots = [polar(1, 0), polar(1, 2.0), polar(1, 4.2), Point(0, 0),
              polar(0.4, 1.3), polar(0.8, 3.0), polar(0.5, 5.5)]
    p = plan(robots, PATTERN)
    assert (p.mover, p.step) == (3, "vacate-centre")
    s = Assessment(robots, PATTERN)
    dest = agreed(s, p.decision.dest)
    assert math.dist(dest, (0.2, 0.0)) < 1e-12
    # nothing within d0/2 of the path
    assert all(point_segment_distance(q, (0, 0), p.decision.dest) >= 0.2 - 1e-12
               for k, q in enumerate(robots) if k != 3)


def test_fill_centre_nearest_robot_goes_to_O():
    pattern = PatternSpec([polar(1, 0), polar(1, math.pi), polar(1, 2.2), polar(1, 4.0),
                           Point(0, 0), polar(0.55, 2.5), polar(0.7, 5.0)])
    assert pattern.normalized.points[4] == pytest.approx((0, 0), abs=1e-12)
    rng = random.Random(2)
    t = random_similarity(rng)
    robots = [polar(1, 0), polar(1, 2.0), polar(1, 4.2), polar(0.2, 1.3),
              polar(0.5, 3.0), polar(0.6, 5.5), polar(0.8, 0.7)]
    world = [t.apply(p) for p in robots]
    p = plan(world, pattern)
    assert (p.mover, p.step) == (3, "fill-centre")
    assert math.dist(p.decision.dest, t.apply((0, 0))) < 1e-9 * t.scale


RADIAL = [polar(0.2, 1.0), polar(0.25, 3.0), polar(0.3, 5.0),
          polar(1, 0), polar(1, 2.0), polar(1, 4.2)]
RING = 0.3 + min(1 - 0.3, 0.55 - 0.3) / 4


def test_radially_out_farthest_inside_ring():
    robots = RADIAL + [polar(0.8, 0.5)]
    p = plan(robots, PATTERN)
    assert (p.mover, p.step) == (2, "radially-out")
    s = Assessment(robots, PATTERN)
    # oracle: same ray from O, radius = ring
    d = agreed(s, p.decision.dest)
    a = s.a[2]
    assert abs(math.hypot(*d) - RING) < 1e-12
    assert abs(math.atan2(d[1], d[0]) - math.atan2(a[1], a[0])) < 1e-12
    assert move_radially_out(Snapshot.of(robots, 2), PATTERN) == p.decision
    assert move_radially_out(Snapshot.of(robots, 1), PATTERN) == STAY


def test_radially_out_side_step_when_h_occupied():
    h = polar(RING, 5.0)
    robots = RADIAL + [h]
    p = plan(robots, PATTERN)
    assert (p.mover, p.step) == (2, "radially-out")   # the robot on the ring is not inside it
    g = p.decision.dest
    assert abs(math.hypot(*g) - RING) < 1e-12
    # first free offset is one angular step away from h
    off = abs((math.atan2(g.y, g.x) - 5.0 + math.pi) % TWO_PI - math.pi)
    assert abs(off - ANGLE_STEP) < 1e-9
    # the angle at the mover between g and h is at most a right angle
    r = robots[2]
    assert (g.x - r.x) * (h.x - r.x) + (g.y - r.y) * (h.y - r.y) >= 0
    assert point_segment_distance(h, r, g) > KAPPA


def test_settle_r1_when_ring_is_clear():
    robots = [polar(0.2, 1.0), polar(0.5, 3.0), polar(0.6, 5.0),
              polar(1, 0), polar(1, 2.0), polar(1, 4.2), polar(0.8, 0.5)]
    p = plan(robots, PATTERN)
    assert (p.mover, p.step) == (0, "settle-r1")
    s = Assessment(robots, PATTERN)
    assert math.dist(agreed(s, p.decision.dest), PATTERN.normalized.points[4]) < 1e-9


# -- routing -------------------------------------------------------------------------

def test_geodesic_straight_and_wrapped():
    assert geodesic((3, 0), (3, 2), 1.0) == (2.0, 0)
    length, direction = geodesic((-2, 0), (2, 0), 1.0)
    assert abs(length - (2 * math.sqrt(3) + math.pi / 3)) < 1e-12 and direction in (1, -1)


def test_first_leg_examples():
    assert first_leg((3, 0), (3, 2), 1.0).dest == Point(3, 2)
    leg = first_leg((-2, 0), (2, 0), 1.0)
    assert leg.arc is None
    assert abs(math.hypot(*leg.dest) - 1) < 1e-12
    # tangent: perpendicular to the radius
    assert abs((leg.dest.x + 2) * leg.dest.x + leg.dest.y * leg.dest.y) < 1e-12
    on = first_leg(polar(1, math.pi), (2, 0), 1.0)
    assert on.arc is not None and on.arc.circle.radius == 1.0


def test_corner_route_example():
    corners, best = corner_route((-2, 0), (2, 0), Circle(Point(0, 0), 1.0))
    got = sorted((round(c.x, 9), round(c.y, 9)) for c in corners)
    k = round(2 / math.sqrt(3), 9)
    assert (0.0, k) in got and (0.0, -k) in got
    assert math.dist(best, (0, 2 / math.sqrt(3))) < 1e-12


def test_fill_sec_route_detours_around_a_blocker():
    p0, q = polar(1, 4.0), polar(0.7, 5.0)
    r0 = Point(p0.x + 1.4 * (q.x - p0.x), p0.y + 1.4 * (q.y - p0.y))   # q sits on r0 -> p0
    robots = INTERIOR + [polar(1, 0), polar(1, math.pi), polar(1, 2.2), r0]
    s = Assessment(robots, PATTERN)
    assert_identity_frame(s, 3)
    p = plan(robots, PATTERN)
    assert (p.mover, p.step) == (6, "fill-sec")
    d = p.decision.dest
    g = s.guard_radius
    assert abs(math.hypot(*d) - (g + 1) / 2) < 1e-12
    assert all(point_segment_distance(o, r0, d) >= KAPPA for k, o in enumerate(robots) if k != 6)
    assert point_segment_distance((0, 0), r0, d) >= g * (1 - 1e-9)
    rp = plan_route(s, 6, 3)
    assert math.dist(rp.detour, d) < 1e-12
    assert math.dist(move_to_destination(robots, PATTERN, route="corner").dest, d) < 1e-12


def test_move_to_destination_segment_never_passes_a_robot():
    # one free robot and one free interior point, path unobstructed
    robots = INTERIOR[:2] + [polar(1, 0), polar(1, math.pi), polar(1, 2.2), polar(1, 4.0), polar(0.9, 5.6)]
    s = Assessment(robots, PATTERN)
    assert s.milestone is Milestone.I2
    dec = move_to_destination(Snapshot.of(robots, 6), PATTERN)
    assert math.dist(dec.dest, polar(0.7, 5.0)) < 1e-12
    assert all(point_segment_distance(o, robots[6], dec.dest) > TAU for o in robots[:6])
    assert move_to_destination(Snapshot.of(robots, 0), PATTERN) == STAY


# -- boundary ------------------------------------------------------------------------

def walk_oracle(free_robots, free_points, filled):
    """Alternate iff, walking the circular order from some free robot, a free point
    is met before any filled point (in either direction)."""
    ents = sorted([(a % TWO_PI, "r") for a in free_robots] + [(a % TWO_PI, "p") for a in free_points]
                  + [(a % TWO_PI, "x") for a in filled])
    n = len(ents)
    for k, (_, kind) in enumerate(ents):
        if kind != "r":
            continue
        for step in (1, -1):
            for m in range(1, n):
                other = ents[(k + step * m) % n][1]
                if other == "x":
                    break
                if other == "p":
                    return True
    return False


def test_alternate_examples():
    assert alternate([0.0], [1.0], [2.0])
    assert not alternate([1.0], [3.0], [0.0, 2.0, 4.0])
    assert alternate([1.0], [4.0], [])
    assert not alternate([], [1.0], [])


def test_alternate_matches_walk_oracle():
    rng = random.Random(3)
    for _ in range(2000):
        k = rng.randint(2, 8)
        angles = rng.sample(range(360), k)
        kinds = [rng.choice("rpx") for _ in range(k)]
        rad = [math.radians(a) for a in angles]
        groups = {c: [a for a, kk in zip(rad, kinds) if kk == c] for c in "rpx"}
        assert alternate(groups["r"], groups["p"], groups["x"]) == \
            walk_oracle(groups["r"], groups["p"], groups["x"])


def test_one_filled_moves_to_diametral_point():
    robots = INTERIOR + [polar(1, 0), polar(1, 2.6), polar(1, 3.5), polar(1, 5.0)]
    s = Assessment(robots, PATTERN)
    assert_identity_frame(s, 3)
    p = plan(robots, PATTERN)
    assert (p.mover, p.step) == (5, "on-boundary")
    arc = p.decision.arc
    assert arc.direction is Direction.CW and abs(arc.to_angle - math.pi) < 1e-12
    assert move_on_boundary(Snapshot.of(robots, 5), PATTERN) == p.decision
    assert move_on_boundary(Snapshot.of(robots, 4), PATTERN) == STAY


def _boundary_states(count, seed):
    """I1 states with interior points filled and free robots on the SEC."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(5, 9)
        pattern = PatternSpec(asymmetric(n, rng.randrange(10**6)))
        lay = pattern.normalized.points
        on = [j for j, p in enumerate(lay) if math.hypot(*p) >= 1 - 1e-9]
        inner = [p for j, p in enumerate(lay) if j not in on]
        if not inner:
            continue
        keep = [j for j in on if j != pattern.normalized.leader and rng.random() < 0.4]
        free = len(on) - 1 - len(keep)
        if free == 0:
            continue
        robots = list(inner) + [Point(1.0, 0.0)] + [lay[j] for j in keep]
        robots += [polar(1, rng.uniform(0.05, TWO_PI - 0.05)) for _ in range(free)]
        try:
            s = Assessment(robots, pattern)
        except (ProtocolError, ValueError):
            continue
        if s.anchor != len(inner) or s.chirality != 1 or s.milestone is not Milestone.I1:
            continue
        if math.dist(s.O, (0, 0)) > 1e-9 or abs(s.R - 1) > 1e-9:
            continue
        p = plan(robots, pattern)
        if p.step == "on-boundary":
            out.append((robots, pattern, s, p))
    return out


def _candidates(s):
    """Unblocked, SEC-keeping arc moves (sweep, i, j) computed by angle walking."""
    lay = s.layout
    robots = [i for i in range(s.n) if s.on_sec(i)]
    ang = {i: s.angle(i) for i in robots}
    free = [i for i in robots if s.point_of[i] is None]
    points = [j for j in lay.on_sec if s.robot_at[j] is None]
    out = []
    for i in free:
        others = sorted(ang[k] for k in robots if k != i)
        for j in points:
            p = lay.angles[j]
            after = sorted(others + [p])
            if max((after[(k + 1) % len(after)] - after[k]) % TWO_PI for k in range(len(after))) > math.pi + 1e-9:
                continue
            for direction in (1, -1):
                sweep = ((p - ang[i]) * direction) % TWO_PI
                blocked = any(1e-6 < ((o - ang[i]) * direction) % TWO_PI < sweep - 1e-6 for o in others)
                if not blocked:
                    out.append((sweep, i, j))
    return out


def test_on_boundary_matches_oracle():
    for robots, pattern, s, p in _boundary_states(60, 4):
        lay = s.layout
        filled = [j for j in lay.on_sec if s.robot_at[j] is not None]
        cands = _candidates(s)
        arc = s.to_snapshot.inverse().apply_arc(p.decision.arc)
        sweep = arc.sweep
        if len(filled) == 1:
            diam = [c for c in cands if abs(abs((lay.angles[c[2]] - lay.angles[filled[0]] + math.pi) % TWO_PI - math.pi) - math.pi) < 1e-9]
            if diam:
                assert abs(sweep - min(c[0] for c in diam)) < 1e-9
                continue

            def keeps(c):
                _, i, j = c
                fr = [s.angle(k) for k in range(s.n) if s.on_sec(k) and s.point_of[k] is None and k != i]
                fp = [lay.angles[k] for k in lay.on_sec if s.robot_at[k] is None and k != j]
                fx = [lay.angles[k] for k in filled] + [lay.angles[j]]
                xs = sorted(fx)
                locked = max((xs[(k + 1) % len(xs)] - xs[k]) % TWO_PI for k in range(len(xs))) <= math.pi + 1e-9
                return not fp or locked or walk_oracle(fr, fp, fx)

            good = [c for c in cands if keeps(c)]
            assert abs(sweep - min(c[0] for c in good)) < 1e-9
            assert move_ensuring_alternate(robots, pattern) == p.decision
        else:
            assert abs(sweep - min(c[0] for c in cands)) < 1e-9
        # the mover ends on a free boundary pattern point
        assert any(abs((arc.to_angle - lay.angles[j] + math.pi) % TWO_PI - math.pi) < 1e-9
                   for j in lay.on_sec if s.robot_at[j] is None)


def test_generate_alternate_half_gap_step():
    # two filled boundary points: the leader at 0 and the robot at 2.2
    robots = INTERIOR + [polar(1, 0), polar(1, 2.2), polar(1, 3.6), polar(1, 5.2)]
    s = Assessment(robots, PATTERN)
    assert_identity_frame(s, 3)
    dec = generate_alternate(robots, PATTERN)
    arc = s.to_snapshot.inverse().apply_arc(dec.arc)
    # the non-leader filled robot heads for the angularly nearest free point (pi), half way to
    # the nearest feature in that direction (pi itself)
    assert abs(arc.from_angle - 2.2) < 1e-12 and arc.direction is Direction.CCW
    assert abs(arc.sweep - (math.pi - 2.2) / 2) < 1e-12
    assert generate_alternate(Snapshot.of(robots, 0), PATTERN) == STAY
    assert generate_alternate(Snapshot.of(robots, 4), PATTERN) == dec
    assert is_alternate(robots, PATTERN)


# -- whole-protocol properties -------------------------------------------------------

def test_single_mover_and_equivariance_on_random_states():
    rng = random.Random(6)
    for seed in range(30):
        n = 4 + seed % 7
        robots = asymmetric(n, 300 + seed)
        pattern = PatternSpec(asymmetric(n, 400 + seed))
        world = [pattern_formation(Snapshot.of(robots, i), pattern) for i in range(n)]
        movers = [i for i, d in enumerate(world) if not d.is_stay]
        assert len(movers) <= 1
        for _ in range(3):
            t = random_similarity(rng)
            local = [t.apply(p) for p in robots]
            for i in range(n):
                d = pattern_formation(Snapshot.of(local, i), pattern).transform(t.inverse())
                assert d.kind == world[i].kind
                if not d.is_stay:
                    assert math.dist(d.dest, world[i].dest) < 1e-8


def test_decision_is_pure():
    robots = asymmetric(8, 7)
    pattern = PatternSpec(asymmetric(8, 8))
    snap = Snapshot.of(robots, plan(robots, pattern).mover)
    first = pattern_formation(snap, pattern)
    assert all(pattern_formation(snap, pattern) == first for _ in range(50))
