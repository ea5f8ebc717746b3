"""Standalone SVG snapshots of a trace."""

from __future__ import annotations

import math
import os
from typing import Sequence

from .agreement import PatternSpec
from .geom import Point, sec
from .motion import Assessment, ProtocolError


def frames(trace: Sequence[dict], every: int) -> list[dict]:
    """State after 0, k, 2k, ... activations, plus the final state."""
    if every < 1:
        raise ValueError("--every must be at least 1")
    pos = [Point(*p) for p in trace[0]["robots"]]
    out = [{"activations": 0, "positions": list(pos), "path": None, "active": None}]
    count = 0
    last_path, active = None, None
    for rec in trace[1:]:
        if rec["event"] == "Activated":
            count += 1
            if count > 1 and (count - 1) % every == 0:
                out.append({"activations": count - 1, "positions": list(pos),
                            "path": last_path, "active": active})
        elif rec["event"] == "Moved":
            pos[rec["id"]] = Point(*rec["to"])
            last_path, active = rec["path"], rec["id"]
    if count > 0:
        out.append({"activations": count, "positions": list(pos), "path": last_path, "active": active})
    return out


def _bounds(trace: Sequence[dict]) -> tuple[float, float, float, float]:
    pts = [p for p in trace[0]["robots"]]
    pts += [rec["to"] for rec in trace if rec["event"] == "Moved"]
    c = sec(pts)
    m = c.radius * 1.15 or 1.0
    return c.center.x - m, c.center.y - m, 2 * m, 2 * m


def svg(frame: dict, pattern: PatternSpec | None, view: tuple[float, float, float, float]) -> str:
    x0, y0, w, h = view
    unit = w / 400.0
    pos = frame["positions"]
    body = []
    c = sec(pos)
    body.append(f'<circle cx="{c.center.x:.9g}" cy="{c.center.y:.9g}" r="{c.radius:.9g}" '
                f'fill="none" stroke="#888" stroke-width="{unit:.4g}"/>')
    placed = None
    if pattern is not None:
        try:
            s = Assessment(pos, pattern)
            placed = s.placed.points
            body.append(f'<circle cx="{c.center.x:.9g}" cy="{c.center.y:.9g}" '
                        f'r="{s.guard_radius * c.radius:.9g}" fill="none" stroke="#bbb" '
                        f'stroke-dasharray="{4 * unit:.4g}" stroke-width="{unit:.4g}"/>')
        except (ProtocolError, ValueError):
            placed = None
    path = frame["path"]
    if path is not None:
        if path["kind"] == "segment":
            (ax, ay), (bx, by) = path["from"], path["to"]
            d = f"M {ax:.9g} {ay:.9g} L {bx:.9g} {by:.9g}"
        else:
            cx, cy = path["center"]
            r = path["radius"]
            a0, a1 = path["from_angle"], path["to_angle"]
            sweep = (a1 - a0) % (2 * math.pi) if path["ccw"] else (a0 - a1) % (2 * math.pi)
            d = (f"M {cx + r * math.cos(a0):.9g} {cy + r * math.sin(a0):.9g} "
                 f"A {r:.9g} {r:.9g} 0 {1 if sweep > math.pi else 0} {1 if path['ccw'] else 0} "
                 f"{cx + r * math.cos(a1):.9g} {cy + r * math.sin(a1):.9g}")
        body.append(f'<path d="{d}" fill="none" stroke="#d62728" stroke-width="{2 * unit:.4g}"/>')
    for p in placed or ():
        k = 5 * unit
        body.append(f'<path d="M {p.x - k:.9g} {p.y - k:.9g} L {p.x + k:.9g} {p.y + k:.9g} '
                    f'M {p.x - k:.9g} {p.y + k:.9g} L {p.x + k:.9g} {p.y - k:.9g}" '
                    f'stroke="#1f77b4" stroke-width="{unit:.4g}"/>')
    for i, p in enumerate(pos):
        colour = "#d62728" if i == frame["active"] else "#222"
        body.append(f'<circle cx="{p.x:.9g}" cy="{p.y:.9g}" r="{3 * unit:.4g}" fill="{colour}"/>')
    # flip y so that +y points up
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="400" height="400" '
            f'viewBox="{x0:.9g} {-(y0 + h):.9g} {w:.9g} {h:.9g}">\n'
            f'<title>after {frame["activations"]} activations</title>\n'
            f'<g transform="scale(1,-1)">\n' + "\n".join(body) + "\n</g>\n</svg>\n")


def render(trace: Sequence[dict], every: int, out_dir) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    try:
        pattern = PatternSpec(trace[0]["pattern"])
    except (KeyError, ValueError):
        pattern = None
    view = _bounds(trace)
    paths = []
    for k, fr in enumerate(frames(trace, every)):
        p = os.path.join(out_dir, f"frame_{k:05d}.svg")
        with open(p, "w", encoding="utf-8") as fh:
            fh.write(svg(fr, pattern, view))
        paths.append(p)
    return paths
