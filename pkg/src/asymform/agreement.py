"""Common origin, axes and unit, and the pattern placed in them.

Every robot runs the same computation on its own snapshot.  Because the
snapshot only differs between robots by a similarity transform, and every
choice below is similarity-invariant, all robots end up with the same placed
pattern once results are mapped back to the world.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

from .canon import (
    CanonicalOrder,
    Configuration,
    ConfigurationError,
    NotOrderableError,
    canonical_order,
    second_reference,
    symmetry_report,
)
from .geom import Point, Similarity


class AgreementError(ValueError):
    pass


@dataclass(frozen=True)
class AgreedFrame:
    """Axes shared by all robots.

    ``to_snapshot`` maps agreed coordinates (SEC centred at the origin, unit
    radius, +X through the anchor) into the observer's snapshot coordinates.
    """

    origin: Point
    x_axis: tuple[float, float]
    y_sign: int
    unit: float

    def __post_init__(self):
        if not self.unit > 0.0:
            raise AgreementError("agreed unit must be positive")
        n = math.hypot(*self.x_axis)
        if abs(n - 1.0) > 1e-9:
            object.__setattr__(self, "x_axis", (self.x_axis[0] / n, self.x_axis[1] / n))

    @classmethod
    def through(cls, origin, anchor, y_sign: int) -> AgreedFrame:
        """Frame centred at ``origin`` with +X pointing at ``anchor``."""
        dx, dy = anchor[0] - origin[0], anchor[1] - origin[1]
        unit = math.hypot(dx, dy)
        if unit == 0.0:
            raise AgreementError("anchor coincides with origin")
        return cls(Point(*origin), (dx / unit, dy / unit), y_sign, unit)

    @functools.cached_property
    def to_snapshot(self) -> Similarity:
        return Similarity(self.origin.x, self.origin.y,
                          math.atan2(self.x_axis[1], self.x_axis[0]),
                          self.y_sign < 0, self.unit)

    @functools.cached_property
    def to_local(self) -> Similarity:
        return self.to_snapshot.inverse()


@dataclass(frozen=True)
class NormalizedPattern:
    points: tuple[Point, ...]
    order: CanonicalOrder
    leader: int
    reference: int


@dataclass(frozen=True)
class PlacedPattern:
    points: tuple[Point, ...]
    order: CanonicalOrder
    frame: AgreedFrame


class PatternSpec:
    """A target pattern in the frame it was given in.  Immutable; normalizes lazily."""

    def __init__(self, points: Sequence | Configuration):
        self.points = points if isinstance(points, Configuration) else Configuration(points)
        if len(self.points) < 2:
            raise AgreementError("pattern needs at least two points")

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"PatternSpec({list(self.points.points)!r})"

    @functools.cached_property
    def normalized(self) -> NormalizedPattern:
        return agreement_pattern(self)


def _normalize(c: Configuration) -> tuple[AgreedFrame, CanonicalOrder, int, int]:
    order = canonical_order(c)
    leader = order.start_point_index
    ref = second_reference(c, leader)
    o = c.circle.center
    lp = c.points[leader]
    ux, uy = lp[0] - o[0], lp[1] - o[1]
    rp = c.points[ref]
    side = ux * (rp[1] - o[1]) - uy * (rp[0] - o[0])
    return AgreedFrame.through(o, lp, 1 if side > 0 else -1), order, leader, ref


def agreement_pattern(p: PatternSpec) -> NormalizedPattern:
    if len(p.points) < 2:
        raise AgreementError("pattern needs at least two points")
    frame, order, leader, ref = _normalize(p.points)
    pts = tuple(frame.to_local.apply_all(p.points.points))
    pts = pts[:leader] + (Point(1.0, 0.0),) + pts[leader + 1:]
    return NormalizedPattern(pts, order, leader, ref)


def agreement_coordinate_system(snapshot: Configuration | Sequence,
                                p: PatternSpec) -> tuple[AgreedFrame, PlacedPattern]:
    """Frame from the robots' own leader and handedness; pattern plotted into it."""
    c = snapshot if isinstance(snapshot, Configuration) else Configuration(snapshot)
    if len(c) != len(p):
        raise AgreementError("pattern/robot cardinality mismatch")
    try:
        frame, _, _, _ = _normalize(c)
    except NotOrderableError as exc:
        raise AgreementError("unorderable configuration") from exc
    norm = p.normalized
    return frame, PlacedPattern(tuple(frame.to_snapshot.apply_all(norm.points)), norm.order, frame)


def is_orderable(c: Configuration) -> bool:
    return symmetry_report(c).trivial


__all__ = [
    "AgreedFrame", "AgreementError", "ConfigurationError", "NormalizedPattern",
    "PatternSpec", "PlacedPattern", "agreement_coordinate_system", "agreement_pattern",
    "is_orderable",
]
