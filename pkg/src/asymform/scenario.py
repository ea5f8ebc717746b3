"""Scenario and pattern files.

A scenario file is JSON with a ``version`` field.  A pattern file is plain text
with one ``x y`` pair per line; ``#`` starts a comment.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .canon import Configuration, ConfigurationError, symmetry_report
from .geom import Point
from .sim import DEFAULT_BUDGET, AdversaryConfig, LocalFrame, Scenario, ScenarioError

FORMAT_VERSION = 1
MIN_SPACING_REL = 1e-2
MAX_REJECTIONS = 10**4


class ParseError(ValueError):
    pass


@dataclass
class ScenarioFile:
    robots: list[Point]
    pattern: list[Point]
    frames: int | list[LocalFrame] = 0          # a seed, or one frame per robot
    adversary: AdversaryConfig = field(default_factory=AdversaryConfig)
    tolerances: dict = field(default_factory=dict)
    chord_mode: bool = False

    def to_json(self) -> dict:
        frames = self.frames if isinstance(self.frames, int) else [f.to_json() for f in self.frames]
        return {
            "version": FORMAT_VERSION,
            "robots": [[p.x, p.y] for p in self.robots],
            "pattern": [[p.x, p.y] for p in self.pattern],
            "frames": {"seed": frames} if isinstance(frames, int) else frames,
            "adversary": self.adversary.to_json(),
            "tolerances": dict(self.tolerances),
            "chord_mode": self.chord_mode,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def to_scenario(self) -> Scenario:
        if isinstance(self.frames, int):
            sc = Scenario(self.robots, self.pattern, frames_seed=self.frames,
                          adversary=self.adversary, chord_mode=self.chord_mode)
        else:
            sc = Scenario(self.robots, self.pattern, frames=list(self.frames),
                          adversary=self.adversary, chord_mode=self.chord_mode)
        sc.budget = int(self.tolerances.get("budget", DEFAULT_BUDGET))
        return sc


def _points(raw, what: str) -> list[Point]:
    if not isinstance(raw, list):
        raise ParseError(f"{what} must be a list of [x, y] pairs")
    out = []
    for k, p in enumerate(raw):
        if not (isinstance(p, list) and len(p) == 2 and all(isinstance(v, (int, float)) for v in p)):
            raise ParseError(f"{what}[{k}] is not an [x, y] pair")
        try:
            out.append(Point(*p))
        except ValueError as exc:
            raise ParseError(f"{what}[{k}]: {exc}") from exc
    return out


def parse_scenario(text: str) -> ScenarioFile:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise ParseError("scenario must be a JSON object")
    if d.get("version") != FORMAT_VERSION:
        raise ParseError(f"unsupported scenario version {d.get('version')!r}")
    robots = _points(d.get("robots"), "robots")
    pattern = _points(d.get("pattern"), "pattern")
    if len(robots) != len(pattern):
        raise ParseError("pattern/robot cardinality mismatch")
    raw = d.get("frames", {"seed": 0})
    try:
        if isinstance(raw, dict) and set(raw) == {"seed"} and isinstance(raw["seed"], int):
            frames: int | list[LocalFrame] = raw["seed"]
        elif isinstance(raw, list):
            frames = [LocalFrame.from_json(f) for f in raw]
            if len(frames) != len(robots):
                raise ParseError("one frame per robot is required")
        else:
            raise ParseError("frames must be {\"seed\": int} or a list of frames")
        adversary = AdversaryConfig.from_json(d.get("adversary", {}))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"bad frames or adversary: {exc}") from exc
    tol = d.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ParseError("tolerances must be an object")
    return ScenarioFile(robots, pattern, frames, adversary, tol, bool(d.get("chord_mode", False)))


def load_scenario(path) -> ScenarioFile:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ParseError(str(exc)) from exc


def parse_pattern_text(text: str) -> list[Point]:
    pts = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ParseError(f"line {n}: expected two numbers")
        try:
            pts.append(Point(float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ParseError(f"line {n}: {exc}") from exc
    if not pts:
        raise ParseError("pattern file has no points")
    return pts


def load_pattern_text(path) -> list[Point]:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_pattern_text(fh.read())
    except OSError as exc:
        raise ParseError(str(exc)) from exc


def acceptable(points) -> bool:
    """Trivial symmetry group and well separated points."""
    try:
        c = Configuration(points)
    except ConfigurationError:
        return False
    r = c.circle.radius
    pts = c.points
    if any(math.dist(p, q) < MIN_SPACING_REL * r for i, p in enumerate(pts) for q in pts[i + 1:]):
        return False
    return symmetry_report(c).trivial


def random_points(n: int, rng: random.Random) -> list[Point]:
    for _ in range(MAX_REJECTIONS):
        pts = [Point(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) for _ in range(n)]
        if acceptable(pts):
            return pts
    raise ScenarioError("too many rejected samples")


def generate(n: int, seed: int, policy: str = "RoundRobin", pattern: list[Point] | None = None) -> ScenarioFile:
    if n < 3:
        raise ScenarioError("need at least three robots")
    rng = random.Random(f"scenario:{n}:{seed}")
    robots = random_points(n, rng)
    if pattern is None:
        pattern = random_points(n, rng)
    elif len(pattern) != n:
        raise ScenarioError("pattern/robot cardinality mismatch")
    return ScenarioFile(robots, list(pattern), seed, AdversaryConfig(seed=seed, policy=policy))
