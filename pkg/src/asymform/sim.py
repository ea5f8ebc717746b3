"""Asynchronous Look-Compute-Move world with an adversarial scheduler.

One activation advances one robot by one phase.  Moves are not instantaneous:
the adversary decides how far each Move activation gets (never less than a
minimum progress unless the destination is reached), may stop a robot early,
and other robots observe movers at their intermediate positions.

Robots are oblivious.  Each robot keeps only the snapshot and decision of its
current cycle; both are dropped when it returns to Wait.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .agreement import PatternSpec
from .canon import Configuration, ConfigurationError, symmetry_report
from .geom import (
    TAU,
    TWO_PI,
    Arc,
    Circle,
    Direction,
    Point,
    Similarity,
    dist,
    point_arc_distance,
    point_segment_distance,
    sec,
)
from .motion import STAY, Assessment, Decision, Milestone, Plan, ProtocolError, plan

DEFAULT_BUDGET = 10**6
COLLIDE_REL = 1e-7
SEC_DRIFT_REL = 1e-9


class ScenarioError(ValueError):
    pass


class SymmetricInputError(ScenarioError):
    pass


# -- frames and robots ----------------------------------------------------------------

@dataclass(frozen=True)
class LocalFrame:
    """A robot's private coordinate system: local = T(world)."""

    translation: Point = Point(0.0, 0.0)
    rotation: float = 0.0
    reflected: bool = False
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0.0:
            raise ScenarioError("frame scale must be positive")
        object.__setattr__(self, "translation", Point(*self.translation))

    @property
    def to_local(self) -> Similarity:
        return Similarity(self.translation.x, self.translation.y, self.rotation,
                          self.reflected, self.scale)

    @property
    def to_world(self) -> Similarity:
        return self.to_local.inverse()

    @classmethod
    def random(cls, rng: random.Random, box: float = 10.0) -> LocalFrame:
        return cls(Point(rng.uniform(-box, box), rng.uniform(-box, box)),
                   rng.uniform(0.0, TWO_PI), rng.random() < 0.5,
                   math.exp(rng.uniform(math.log(0.1), math.log(10.0))))

    def to_json(self) -> dict:
        return {"translation": list(self.translation), "rotation": self.rotation,
                "reflected": self.reflected, "scale": self.scale}

    @classmethod
    def from_json(cls, d: dict) -> LocalFrame:
        return cls(Point(*d["translation"]), float(d["rotation"]), bool(d["reflected"]),
                   float(d["scale"]))


def frames_from_seed(n: int, seed: int) -> list[LocalFrame]:
    rng = random.Random(f"frames:{seed}")
    return [LocalFrame.random(rng) for _ in range(n)]


class Phase(str, enum.Enum):
    WAIT = "Wait"
    LOOK = "Look"
    COMPUTE = "Compute"
    MOVE = "Move"


@dataclass
class RobotState:
    id: int
    position: Point
    frame: LocalFrame
    phase: Phase = Phase.WAIT
    snapshot: tuple | None = None          # local coordinates, this cycle only
    computed: Decision | None = None       # world coordinates, Compute phase only
    pending: Decision | None = None        # world coordinates, Move phase only
    arc_progress: float | None = None      # radians already travelled on pending arc
    snapshot_tick: int = -1


# -- adversary ------------------------------------------------------------------------

POLICIES = ("RoundRobin", "RandomFair", "StarveOne")


@dataclass(frozen=True)
class AdversaryConfig:
    seed: int = 0
    policy: str = "RoundRobin"
    starve_target: int = 0
    starve_period: int = 16
    move_fraction: tuple[float, float] = (0.25, 1.0)
    min_progress: float = 1e-3             # relative to the initial SEC radius
    mid_move_snapshots: bool = True
    early_stop: float = 0.05
    fairness: int = 8

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ScenarioError(f"unknown activation policy {self.policy!r}")
        lo, hi = self.move_fraction
        if not (0.0 < lo <= hi <= 1.0):
            raise ScenarioError("move_fraction must satisfy 0 < lo <= hi <= 1")
        object.__setattr__(self, "move_fraction", (float(lo), float(hi)))
        if not self.min_progress > 0.0:
            raise ScenarioError("min_progress must be positive")
        if not 0.0 <= self.early_stop < 1.0:
            raise ScenarioError("early_stop must lie in [0, 1)")
        if self.fairness < 2:
            raise ScenarioError("fairness factor must be at least 2")

    def check(self, n: int) -> None:
        if self.policy == "StarveOne":
            if not 0 <= self.starve_target < n:
                raise ScenarioError("starved robot does not exist")
            if self.starve_period > n * self.fairness:
                raise ScenarioError("StarveOne period violates the fairness bound")

    def to_json(self) -> dict:
        d = asdict(self)
        d["move_fraction"] = list(self.move_fraction)
        return d

    @classmethod
    def from_json(cls, d: dict) -> AdversaryConfig:
        d = dict(d)
        if "move_fraction" in d:
            d["move_fraction"] = tuple(d["move_fraction"])
        return cls(**d)


class Adversary:
    """Chooses who acts next and how far moves get; always fair."""

    def __init__(self, config: AdversaryConfig, n: int):
        config.check(n)
        self.config = config
        self.n = n
        self.rng = random.Random(f"adversary:{config.seed}")
        self.count = 0
        self.last = [-1] * n
        self.bound = n * config.fairness - n

    def choose(self) -> int:
        c = self.config
        waits = [self.count - 1 - t for t in self.last]
        worst = max(range(self.n), key=lambda i: (waits[i], -i))
        if waits[worst] >= self.bound:
            pick = worst
        elif c.policy == "RoundRobin":
            pick = self.count % self.n
        elif c.policy == "RandomFair":
            pick = self.rng.randrange(self.n)
        else:
            k = c.starve_target
            if self.count - self.last[k] >= c.starve_period or self.n == 1:
                pick = k
            else:
                pick = self.rng.randrange(self.n - 1)
                pick += pick >= k
        self.last[pick] = self.count
        self.count += 1
        return pick

    def progress(self, remaining: float, delta: float) -> float:
        lo, hi = self.config.move_fraction
        f = self.rng.uniform(lo, hi)
        return min(remaining, max(delta, f * remaining))

    def stops_early(self) -> bool:
        return self.config.early_stop > 0.0 and self.rng.random() < self.config.early_stop


# -- trace ------------------------------------------------------------------------------

def _pt(p) -> list[float]:
    return [float(p[0]), float(p[1])]


def decision_json(d: Decision) -> dict:
    if d.is_stay:
        return {"kind": "Stay"}
    out = {"kind": d.kind, "dest": _pt(d.dest)}
    if d.arc is not None:
        out.update(arc_json(d.arc))
    return out


def arc_json(a: Arc) -> dict:
    return {"center": _pt(a.circle.center), "radius": a.circle.radius,
            "from_angle": a.from_angle, "to_angle": a.to_angle,
            "ccw": a.direction is Direction.CCW}


def arc_from_json(d: dict) -> Arc:
    return Arc(Circle(Point(*d["center"]), float(d["radius"])), float(d["from_angle"]),
               float(d["to_angle"]), Direction.CCW if d["ccw"] else Direction.CW)


class Trace(list):
    """Ordered event records; each is a dict with a ``tick`` and an ``event`` name."""

    def add(self, tick: int, event: str, **fields) -> None:
        rec = {"tick": tick, "event": event}
        rec.update(fields)
        self.append(rec)

    def dumps(self) -> str:
        return "".join(json.dumps(e, separators=(",", ":")) + "\n" for e in self)

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def read(cls, path) -> Trace:
        t = cls()
        with open(path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"line {n}: {exc}") from exc
                if not isinstance(rec, dict) or "event" not in rec or "tick" not in rec:
                    raise ValueError(f"line {n}: not a trace record")
                t.append(rec)
        if not t or t[0]["event"] != "Start":
            raise ValueError("trace does not begin with a Start record")
        return t

    def events(self, name: str) -> list[dict]:
        return [e for e in self if e["event"] == name]


@dataclass(frozen=True)
class Outcome:
    status: str                     # "Formed", "ActivationBudgetExceeded" or "ProtocolError"
    activations_used: int
    min_pairwise_distance_observed: float   # relative to the initial SEC radius
    max_sec_drift_after_I1: float           # relative to the SEC radius at I1
    reason: str = ""

    def to_json(self) -> dict:
        return asdict(self)


# -- scenario ---------------------------------------------------------------------------

@dataclass
class Scenario:
    robots: list[Point]
    pattern: list[Point]
    frames: list[LocalFrame] | None = None
    frames_seed: int | None = None
    adversary: AdversaryConfig = field(default_factory=AdversaryConfig)
    budget: int = DEFAULT_BUDGET
    chord_mode: bool = False

    def __post_init__(self):
        self.robots = [Point(*p) for p in self.robots]
        self.pattern = [Point(*p) for p in self.pattern]
        if self.frames is None:
            self.frames = frames_from_seed(len(self.robots),
                                           0 if self.frames_seed is None else self.frames_seed)
        if len(self.frames) != len(self.robots):
            raise ScenarioError("one local frame per robot is required")

    def validate(self) -> tuple[Configuration, PatternSpec]:
        if len(self.robots) != len(self.pattern):
            raise ScenarioError("pattern/robot cardinality mismatch")
        if len(self.robots) < 2:
            raise ScenarioError("at least two robots are required")
        try:
            robots = Configuration(self.robots)
            pattern = Configuration(self.pattern)
        except ConfigurationError as exc:
            raise ScenarioError(str(exc)) from exc
        if not symmetry_report(robots).trivial:
            raise SymmetricInputError("robot configuration is symmetric")
        if not symmetry_report(pattern).trivial:
            raise SymmetricInputError("pattern is symmetric")
        self.adversary.check(len(self.robots))
        return robots, PatternSpec(pattern)


# -- world ---------------------------------------------------------------------------------

class World:
    """Mutable simulation state; ``step`` is the only way to advance it."""

    def __init__(self, scenario: Scenario):
        robots, self.pattern = scenario.validate()
        self.scenario = scenario
        self.n = len(robots)
        self.robots = [RobotState(i, p, f) for i, (p, f) in enumerate(zip(robots.points, scenario.frames))]
        self.adversary = Adversary(scenario.adversary, self.n)
        self.R0 = robots.circle.radius
        self.delta = scenario.adversary.min_progress * self.R0
        self.tick = 0
        self.activations = 0
        self.trace = Trace()
        self.milestone = Milestone.I0
        self.last_change = 0
        self.quiet: set[int] = set()
        self.memo: dict[tuple, Plan] = {}
        self.min_dist = self._min_pairwise()
        self.sec_at_i1: Circle | None = None
        self.max_drift = 0.0
        self.error: str | None = None
        self.formed = False
        a = scenario.adversary
        self.trace.add(0, "Start", robots=[_pt(p) for p in robots.points],
                       pattern=[_pt(p) for p in scenario.pattern],
                       frames=[f.to_json() for f in scenario.frames],
                       adversary=a.to_json(), chord_mode=scenario.chord_mode)
        self._update_milestone()

    def positions(self) -> list[Point]:
        return [r.position for r in self.robots]

    def _min_pairwise(self) -> float:
        pts = self.positions()
        return min((dist(p, q) for i, p in enumerate(pts) for q in pts[i + 1:]), default=math.inf) / self.R0

    def _emit(self, event: str, **fields) -> None:
        self.tick += 1
        self.trace.add(self.tick, event, **fields)

    def _update_milestone(self) -> None:
        try:
            s = Assessment(self.positions(), self.pattern)
            m = s.milestone
        except (ProtocolError, ConfigurationError):
            return
        if m != self.milestone or self.tick == 0:
            name = "MilestoneReached" if m >= self.milestone else "MilestoneRegressed"
            if m != self.milestone:
                self._emit(name, milestone=m.name, pstar=[_pt(p) for p in s.placed.points])
            self.milestone = m
        if m >= Milestone.I1 and self.sec_at_i1 is None:
            self.sec_at_i1 = sec(self.positions())

    # -- lifecycle

    def _look(self, r: RobotState) -> None:
        local = r.frame.to_local.apply_all(self.positions())
        order = sorted(range(self.n), key=lambda i: (local[i].x, local[i].y))
        snap = tuple(local[i] for i in order)
        r.snapshot = (snap, order.index(r.id))
        r.snapshot_tick = self.tick
        self._emit("SnapshotTaken", id=r.id, positions=[_pt(p) for p in snap])

    def _compute(self, r: RobotState) -> None:
        snap, me = r.snapshot
        p = self.memo.get(snap)
        if p is None:
            p = plan(snap, self.pattern)
            self.memo[snap] = p
        local = p.decision if p.mover == me else STAY
        r.computed = local.transform(r.frame.to_world)
        r.snapshot = None
        if r.computed.is_stay and r.snapshot_tick >= self.last_change:
            self.quiet.add(r.id)
        self._emit("Decided", id=r.id, decision=decision_json(r.computed))

    def _start_move(self, r: RobotState) -> None:
        d = r.computed
        r.computed = None
        if d.is_stay:
            r.phase = Phase.WAIT
            return
        if d.arc is not None and self.scenario.chord_mode:
            d = Decision("MoveSegment", d.dest)
        r.pending = d
        r.arc_progress = 0.0 if d.arc is not None else None
        r.phase = Phase.MOVE

    def _advance(self, r: RobotState) -> None:
        d = r.pending
        start = r.position
        if d.arc is None:
            remaining = dist(start, d.dest)
            step = remaining if not self.scenario.adversary.mid_move_snapshots \
                else self.adversary.progress(remaining, self.delta)
            arrived = step >= remaining
            if arrived:
                end = d.dest
            else:
                t = step / remaining
                end = Point(start.x + (d.dest.x - start.x) * t, start.y + (d.dest.y - start.y) * t)
            path = {"kind": "segment", "from": _pt(start), "to": _pt(end)}
        else:
            arc = d.arc
            radius = arc.circle.radius
            left = (arc.sweep - r.arc_progress) * radius
            step = left if not self.scenario.adversary.mid_move_snapshots \
                else self.adversary.progress(left, self.delta)
            arrived = step >= left
            a0 = arc.from_angle + int(arc.direction) * r.arc_progress
            r.arc_progress = arc.sweep if arrived else r.arc_progress + step / radius
            a1 = arc.from_angle + int(arc.direction) * r.arc_progress
            end = arc.end if arrived else arc.circle.point_at(a1)
            path = {"kind": "arc", "center": _pt(arc.circle.center), "radius": radius,
                    "from_angle": a0 % TWO_PI, "to_angle": a1 % TWO_PI,
                    "ccw": arc.direction is Direction.CCW}
        self._observe_path(r.id, start, end, path)
        r.position = end
        if end != start:
            self.last_change = self.tick + 1
            self.quiet.clear()
        self._emit("Moved", id=r.id, **{"from": _pt(start)}, to=_pt(end), path=path)
        if arrived or self.adversary.stops_early():
            r.pending = None
            r.arc_progress = None
            r.phase = Phase.WAIT
        if end != start:
            self._after_change()

    def _observe_path(self, mover: int, start, end, path: dict) -> None:
        others = [q.position for q in self.robots if q.id != mover]
        if path["kind"] == "segment":
            m = min(point_segment_distance(q, start, end) for q in others)
        else:
            arc = arc_from_json(path)
            m = min(point_arc_distance(q, arc) for q in others)
        self.min_dist = min(self.min_dist, m / self.R0)

    def _after_change(self) -> None:
        self._update_milestone()
        if self.sec_at_i1 is not None:
            c = sec(self.positions())
            ref = self.sec_at_i1
            drift = max(dist(c.center, ref.center), abs(c.radius - ref.radius)) / ref.radius
            self.max_drift = max(self.max_drift, drift)

    def step(self) -> int:
        """Advance one robot by one phase; returns the robot id."""
        i = self.adversary.choose()
        r = self.robots[i]
        self.activations += 1
        if r.phase is Phase.WAIT:
            r.phase = Phase.LOOK
            self._emit("Activated", id=i, phase=r.phase.value)
            self._look(r)
        elif r.phase is Phase.LOOK:
            r.phase = Phase.COMPUTE
            self._emit("Activated", id=i, phase=r.phase.value)
            self._compute(r)
        elif r.phase is Phase.COMPUTE:
            self._start_move(r)
            self._emit("Activated", id=i, phase=r.phase.value)
        else:
            self._emit("Activated", id=i, phase=r.phase.value)
            self._advance(r)
        self.formed = self.milestone is Milestone.DONE and len(self.quiet) == self.n
        return i


def step(world: World) -> tuple[World, list[dict]]:
    """Advance ``world`` by one activation and return the new trace records."""
    mark = len(world.trace)
    try:
        world.step()
    except (ProtocolError, ConfigurationError) as exc:
        world.error = str(exc)
        world._emit("Error", reason=str(exc))
    return world, world.trace[mark:]


def run(scenario: Scenario) -> tuple[Trace, Outcome]:
    world = World(scenario)
    status = "ActivationBudgetExceeded"
    while world.activations < scenario.budget:
        step(world)
        if world.error is not None:
            status = "ProtocolError"
            break
        if world.formed:
            status = "Formed"
            break
    outcome = Outcome(status, world.activations, world.min_dist, world.max_drift,
                      world.error or "")
    world._emit("Outcome", **outcome.to_json())
    return world.trace, outcome


# -- trace checkers ----------------------------------------------------------------------

def replay(trace: Sequence[dict]) -> Iterable[tuple[int, list[Point], list[dict]]]:
    """Yield (tick, positions before, Moved events) per tick that moves robots.

    Moved records sharing a tick are treated as simultaneous.
    """
    pos = [Point(*p) for p in trace[0]["robots"]]
    group: list[dict] = []
    for rec in list(trace[1:]) + [None]:
        if group and (rec is None or rec["tick"] != group[0]["tick"]):
            yield group[0]["tick"], list(pos), group
            for m in group:
                pos[m["id"]] = Point(*m["to"])
            group = []
        if rec is not None and rec["event"] == "Moved":
            group.append(rec)


def final_positions(trace: Sequence[dict]) -> list[Point]:
    pos = [Point(*p) for p in trace[0]["robots"]]
    for rec in trace:
        if rec["event"] == "Moved":
            pos[rec["id"]] = Point(*rec["to"])
    return pos


def _path_samples(path: dict, ts) -> "np.ndarray":
    import numpy as np
    if path["kind"] == "segment":
        a, b = np.array(path["from"]), np.array(path["to"])
        return a[None, :] + ts[:, None] * (b - a)[None, :]
    arc = arc_from_json(path)
    ang = arc.from_angle + int(arc.direction) * arc.sweep * ts
    c = arc.circle
    return np.stack([c.center.x + c.radius * np.cos(ang), c.center.y + c.radius * np.sin(ang)], axis=1)


def _segment_pair_distance(p: dict, q: dict) -> float:
    """Closest approach of two robots moving linearly over the same interval."""
    a0, a1 = p["from"], p["to"]
    b0, b1 = q["from"], q["to"]
    wx, wy = a0[0] - b0[0], a0[1] - b0[1]
    vx = (a1[0] - a0[0]) - (b1[0] - b0[0])
    vy = (a1[1] - a0[1]) - (b1[1] - b0[1])
    vv = vx * vx + vy * vy
    t = 0.0 if vv == 0.0 else min(1.0, max(0.0, -(wx * vx + wy * vy) / vv))
    return math.hypot(wx + t * vx, wy + t * vy)


@dataclass(frozen=True)
class CollisionReport:
    min_distance: float            # relative to the initial SEC radius
    violation: dict | None         # {"tick", "ids", "distance"} of the first violation

    @property
    def ok(self) -> bool:
        return self.violation is None


def check_collisions(trace: Sequence[dict], rho: int = 64, threshold: float = COLLIDE_REL) -> CollisionReport:
    import numpy as np
    start = [Point(*p) for p in trace[0]["robots"]]
    R = sec(start).radius or 1.0
    n = len(start)
    ts = np.linspace(0.0, 1.0, rho + 1)
    arr = np.array(start, dtype=float)
    best = math.inf
    violation = None
    if n > 1:
        d = np.hypot(arr[:, None, 0] - arr[None, :, 0], arr[:, None, 1] - arr[None, :, 1])
        best = float(d[np.triu_indices(n, 1)].min())
    for tick, pos, moves in replay(trace):
        movers = {m["id"]: m for m in moves}
        track = {i: _path_samples(m["path"], ts) for i, m in movers.items()}
        static = [i for i in range(n) if i not in movers]
        spts = np.array([pos[i] for i in static], dtype=float).reshape(-1, 2)
        ids = list(movers)
        for k, i in enumerate(ids):
            m = movers[i]
            cand = []
            if len(static):
                dd = np.hypot(track[i][:, None, 0] - spts[None, :, 0], track[i][:, None, 1] - spts[None, :, 1])
                j = int(dd.min(axis=0).argmin())
                if m["path"]["kind"] == "segment":
                    exact = min(point_segment_distance(pos[s], m["path"]["from"], m["path"]["to"]) for s in static)
                else:
                    arc = arc_from_json(m["path"])
                    exact = min(point_arc_distance(pos[s], arc) for s in static)
                cand.append((min(float(dd.min()), exact), (i, static[j])))
            for i2 in ids[k + 1:]:
                dd = float(np.hypot(*(track[i] - track[i2]).T).min())
                if m["path"]["kind"] == "segment" and movers[i2]["path"]["kind"] == "segment":
                    dd = min(dd, _segment_pair_distance(m["path"], movers[i2]["path"]))
                cand.append((dd, (i, i2)))
            for dist_, pair in cand:
                best = min(best, dist_)
                if violation is None and dist_ <= threshold * R:
                    violation = {"tick": tick, "ids": sorted(pair), "distance": dist_ / R}
    return CollisionReport(best / R, violation)


def check_sec_invariance(trace: Sequence[dict]) -> float:
    """Largest relative SEC drift after the first I1 (or later) milestone."""
    ref = None
    worst = 0.0
    pos = [Point(*p) for p in trace[0]["robots"]]
    for rec in trace:
        if rec["event"] == "Moved":
            pos[rec["id"]] = Point(*rec["to"])
            if ref is not None:
                c = sec(pos)
                worst = max(worst, max(dist(c.center, ref.center), abs(c.radius - ref.radius)) / ref.radius)
        elif rec["event"] == "MilestoneReached" and ref is None and rec["milestone"] in ("I1", "I2", "DONE"):
            ref = sec(pos)
    return worst


def match_pattern(final: Sequence, pstar: Sequence, tau_match: float) -> bool:
    """Greedy nearest matching of robots to pattern points within ``tau_match``."""
    if len(final) != len(pstar):
        raise ValueError("pattern/robot cardinality mismatch")
    spacing = min((dist(p, q) for i, p in enumerate(pstar) for q in pstar[i + 1:]), default=math.inf)
    if tau_match >= spacing / 2.0:
        raise ValueError("tolerance too coarse")
    free = list(range(len(final)))
    for p in pstar:
        j = min(free, key=lambda k: dist(final[k], p), default=None)
        if j is None or dist(final[j], p) > tau_match:
            return False
        free.remove(j)
    return True


def milestone_sequence(trace: Sequence[dict]) -> list[tuple[int, str, str]]:
    """(tick, event, milestone) for every milestone change in the trace."""
    return [(e["tick"], e["event"], e["milestone"]) for e in trace
            if e["event"] in ("MilestoneReached", "MilestoneRegressed")]


def placed_pattern(trace: Sequence[dict]) -> list[Point] | None:
    """The placed pattern recorded with the latest milestone, in world coordinates."""
    for e in reversed(trace):
        if e["event"] in ("MilestoneReached", "MilestoneRegressed"):
            return [Point(*p) for p in e["pstar"]]
    return None
