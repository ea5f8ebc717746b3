"""Acceptance criteria 1-10.  Each test records one PASS/FAIL line, printed at
the end of the pytest run (and to stdout with ``-s``)."""

import inspect
import math
import random
import time
from dataclasses import replace

import pytest

from asymform.agreement import PatternSpec, agreement_coordinate_system
from asymform.canon import Configuration, canonical_order, elect_leader
from asymform.geom import sec, sec_bruteforce
from asymform.motion import Assessment, Snapshot, pattern_formation, plan
from asymform.scenario import acceptable, generate, random_points
from asymform.sim import (
    AdversaryConfig, Scenario, check_collisions, check_sec_invariance, final_positions,
    match_pattern, milestone_sequence, placed_pattern, run,
)

from conftest import ACCEPTANCE, asymmetric, random_similarity

SIZES = range(4, 13)
PER_SIZE = 25
POLICIES = ("RoundRobin", "RandomFair", "StarveOne")
ADVERSARY_SEEDS = (0, 1)
STATES_PER_RUN = 8
ORDER = {"I0": 0, "I1": 1, "I2": 2, "DONE": 3}


def report(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _prefix_states(trace, rng, count):
    moves = [i for i, e in enumerate(trace) if e["event"] == "Moved"]
    if not moves:
        return []
    cut = sorted(rng.choice(moves) for _ in range(count))
    pos = [tuple(p) for p in trace[0]["robots"]]
    out, k = [], 0
    for i, e in enumerate(trace):
        if e["event"] == "Moved":
            pos[e["id"]] = tuple(e["to"])
        while k < len(cut) and cut[k] == i:
            out.append(list(pos))
            k += 1
    return out


@pytest.fixture(scope="module")
def campaign():
    """Every criterion-4 run, reduced to what criteria 4-8 need."""
    rng = random.Random("campaign")
    rows = []
    run_time = 0.0
    for n in SIZES:
        for k in range(PER_SIZE):
            for policy in POLICIES:
                for aseed in ADVERSARY_SEEDS:
                    sf = generate(n, k, policy)
                    sf.adversary = replace(sf.adversary, seed=1000 * k + aseed)
                    sc = sf.to_scenario()
                    t0 = time.perf_counter()
                    trace, out = run(sc)
                    run_time += time.perf_counter() - t0
                    final = final_positions(trace)
                    pstar = placed_pattern(trace)
                    R = sec(sc.robots).radius
                    seq = milestone_sequence(trace)
                    levels = [ORDER[m] for _, _, m in seq]
                    rows.append({
                        "n": n, "policy": policy, "status": out.status, "R": R,
                        "activations": out.activations_used,
                        "matched": pstar is not None and match_pattern(final, pstar, 1e-6 * R),
                        "collisions": check_collisions(trace),
                        "drift": check_sec_invariance(trace),
                        "monotone": all(e == "MilestoneReached" for _, e, _ in seq)
                                    and levels == sorted(levels) and levels[-1:] == [3],
                        "states": _prefix_states(trace, rng, STATES_PER_RUN),
                        "frames": sc.frames, "pattern": PatternSpec(sc.pattern),
                    })
    return rows, run_time


def test_criterion_01_sec_oracle():
    rng = random.Random(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = rng.randint(1, 12)
        pts = [(rng.uniform(-10, 10), rng.uniform(-10, 10)) for _ in range(n)]
        a, b = sec(pts), sec_bruteforce(pts)
        scale = max(b.radius, 1e-12) if n > 1 else 1.0
        worst = max(worst, math.dist(a.center, b.center) / scale, abs(a.radius - b.radius) / scale)
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-9 and dt < 5.0, f"200 sets, worst relative error {worst:.2e}, {dt:.2f}s")


def test_criterion_02_ordering_invariance():
    rng = random.Random(2)
    t0 = time.perf_counter()
    failures = 0
    for k in range(100):
        pts = asymmetric(3 + k % 10, 5000 + k)
        c = Configuration(pts)
        perm, leader = canonical_order(c).permutation, elect_leader(c)
        for _ in range(10):
            t = random_similarity(rng)
            moved = Configuration([t.apply(p) for p in pts])
            if canonical_order(moved).permutation != perm or elect_leader(moved) != leader:
                failures += 1
    dt = time.perf_counter() - t0
    report(2, failures == 0 and dt < 10.0, f"1000 transformed sets, {failures} failures, {dt:.2f}s")


def test_criterion_03_agreement_uniqueness():
    failures = 0
    worst = 0.0
    for k in range(100):
        n = 4 + k % 9
        sc = generate(n, 7000 + k).to_scenario()
        pattern = PatternSpec(sc.pattern)
        R = sec(sc.robots).radius
        # the start and a state part-way through the run
        trace, _ = run(replace(sc, budget=40 * n))
        for world in (sc.robots, final_positions(trace)):
            views = []
            for f in sc.frames:
                local = f.to_local.apply_all(world)
                placed = Assessment(local, pattern).placed.points
                _, leader_based = agreement_coordinate_system(local, pattern)
                views.append((f.to_world.apply_all(placed), f.to_world.apply_all(leader_based.points)))
            for a, b in views[1:]:
                for ref, got in ((views[0][0], a), (views[0][1], b)):
                    err = max(math.dist(p, q) for p, q in zip(ref, got)) / R
                    worst = max(worst, err)
                    failures += err > 1e-8
    report(3, failures == 0, f"100 scenarios x 2 states, worst disagreement {worst:.2e} R, {failures} failures")


def test_criterion_04_formation(campaign):
    rows, run_time = campaign
    bad = [r for r in rows if r["status"] != "Formed" or not r["matched"]]
    most = max(r["activations"] for r in rows)
    report(4, not bad and run_time < 300.0,
           f"{len(rows)} runs, {len(bad)} not formed or unmatched, max {most} activations, {run_time:.1f}s")


def test_criterion_05_collisions(campaign):
    rows, _ = campaign
    bad = [r for r in rows if not r["collisions"].ok]
    low = min(r["collisions"].min_distance for r in rows)
    report(5, not bad and low > 1e-7, f"{len(rows)} runs, {len(bad)} violations, min distance {low:.2e} R")


def _boundary_heavy(seed):
    rng = random.Random(f"chord:{seed}")
    while True:
        robots = [(math.cos(t), math.sin(t)) for t in (rng.uniform(0, 2 * math.pi) for _ in range(5))]
        robots += [(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)) for _ in range(2)]
        if acceptable(robots):
            return robots, random_points(7, rng)


def test_criterion_06_sec_invariance(campaign):
    rows, _ = campaign
    worst = max(r["drift"] for r in rows)
    # chord mode replaces boundary arcs with straight cuts and should break the invariant
    chord = 0.0
    for seed in range(20):
        robots, pattern = _boundary_heavy(seed)
        sc = Scenario(robots, pattern, frames_seed=seed, adversary=AdversaryConfig(seed=seed),
                      chord_mode=True)
        trace, _ = run(sc)
        chord = check_sec_invariance(trace)
        if chord > 1e-9:
            break
    report(6, worst <= 1e-9 and chord > 1e-9,
           f"max drift {worst:.2e} over {len(rows)} runs; chord mode drift {chord:.2e} (seed {seed})")


def test_criterion_07_monotonicity(campaign):
    rows, _ = campaign
    bad = sum(not r["monotone"] for r in rows)
    report(7, bad == 0, f"{len(rows)} traces, {bad} with regression or out-of-order milestones")


def test_criterion_08_single_mover(campaign):
    rows, _ = campaign
    states = [(s, r["frames"], r["pattern"]) for r in rows for s in r["states"]][:10_000]
    worst = 0
    for world, frames, pattern in states:
        movers = 0
        for i, f in enumerate(frames):
            local = f.to_local.apply_all(world)
            if not pattern_formation(Snapshot.of(local, i), pattern).is_stay:
                movers += 1
        worst = max(worst, movers)
    report(8, len(states) == 10_000 and worst <= 1, f"{len(states)} states, at most {worst} mover(s)")


def test_criterion_09_purity():
    params = list(inspect.signature(pattern_formation).parameters)
    fields = list(inspect.signature(Snapshot).parameters)
    structural = params == ["snapshot", "pattern"] and fields == ["robots", "self_index"]
    mismatches = 0
    snaps = []
    for k in range(20):
        n = 4 + k % 9
        sc = generate(n, 9000 + k).to_scenario()
        trace, _ = run(replace(sc, budget=30 * n))
        world = final_positions(trace)
        pattern = PatternSpec(sc.pattern)
        mover = plan(world, pattern).mover
        snaps.append((Snapshot.of(world, 0 if mover is None else mover), pattern))
    first = [pattern_formation(s, p) for s, p in snaps]
    for _ in range(100):
        for (s, p), d in zip(snaps, first):
            mismatches += pattern_formation(s, p) != d
    report(9, structural and mismatches == 0,
           f"inputs {params}, {len(snaps)} snapshots x 100 calls, {mismatches} mismatches")


def test_criterion_10_determinism():
    same = 0
    cases = [(n, policy) for n in (5, 9) for policy in POLICIES]
    for n, policy in cases:
        sc = generate(n, 42, policy).to_scenario()
        a, _ = run(sc)
        b, _ = run(generate(n, 42, policy).to_scenario())
        same += a.dumps().encode() == b.dumps().encode()
    report(10, same == len(cases), f"{same}/{len(cases)} trace pairs byte-identical")
