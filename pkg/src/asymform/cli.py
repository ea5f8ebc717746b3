"""Command line: generate, run, verify and render.

Exit codes: 0 formed (or all checks passed), 1 a verification check failed,
2 malformed input or unwritable output, 3 symmetric input, 4 activation
budget exceeded, 5 protocol error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .scenario import ParseError, generate, load_pattern_text, load_scenario
from .sim import (
    POLICIES,
    ScenarioError,
    SymmetricInputError,
    Trace,
    check_collisions,
    check_sec_invariance,
    final_positions,
    match_pattern,
    placed_pattern,
    run,
)

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_SYMMETRIC, EXIT_BUDGET, EXIT_PROTOCOL = 0, 1, 2, 3, 4, 5
STATUS_EXIT = {"Formed": EXIT_OK, "ActivationBudgetExceeded": EXIT_BUDGET, "ProtocolError": EXIT_PROTOCOL}
SEED_ENV = "ASYMFORM_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def cmd_generate(args) -> int:
    try:
        pattern = load_pattern_text(args.pattern) if args.pattern else None
        sf = generate(args.n, args.seed, args.adversary, pattern)
    except (ParseError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = sf.dumps()
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        sf = load_scenario(args.scenario)
        if args.pattern:
            sf.pattern = load_pattern_text(args.pattern)
        adv = sf.adversary
        if args.seed is not None:
            adv = replace(adv, seed=args.seed)
        if args.adversary:
            adv = replace(adv, policy=args.adversary)
        sf.adversary = adv
        if args.budget is not None:
            sf.tolerances["budget"] = args.budget
        if args.chord:
            sf.chord_mode = True
        scenario = sf.to_scenario()
        scenario.validate()
    except SymmetricInputError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_SYMMETRIC
    except (ParseError, ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    trace, outcome = run(scenario)
    if args.trace_out:
        try:
            trace.write(args.trace_out)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    print(f"status: {outcome.status}")
    print(f"activations: {outcome.activations_used}")
    print(f"min pairwise distance (x SEC radius): {outcome.min_pairwise_distance_observed:.6g}")
    print(f"max SEC drift after I1 (relative): {outcome.max_sec_drift_after_I1:.3g}")
    if outcome.reason:
        print(f"reason: {outcome.reason}")
    return STATUS_EXIT[outcome.status]


def cmd_verify(args) -> int:
    try:
        trace = Trace.read(args.trace)
        final = final_positions(trace)
        pstar = placed_pattern(trace)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: malformed trace: {exc}", file=sys.stderr)
        return EXIT_INPUT
    from .geom import sec

    R = sec([p for p in trace[0]["robots"]]).radius or 1.0
    col = check_collisions(trace)
    drift = check_sec_invariance(trace)
    results = [("collision-free", col.ok, f"min distance {col.min_distance:.3g} x R"),
               ("sec-invariant", drift <= 1e-9, f"max drift {drift:.3g}")]
    if pstar is None:
        results.append(("pattern-formed", False, "no placed pattern recorded"))
    else:
        try:
            ok = match_pattern(final, pstar, args.tau_match * R)
            results.append(("pattern-formed", ok, f"tolerance {args.tau_match:g} x R"))
        except ValueError as exc:
            results.append(("pattern-formed", False, str(exc)))
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_CHECK


def cmd_render(args) -> int:
    from .render import render

    try:
        trace = Trace.read(args.trace)
    except (OSError, ValueError) as exc:
        print(f"error: malformed trace: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        paths = render(trace, args.every, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"wrote {len(paths)} frames to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asymform",
                                description="Asynchronous pattern formation by oblivious robots.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random asymmetric scenario")
    g.add_argument("--n", type=int, required=True, help="number of robots (>= 3)")
    g.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
    g.add_argument("--adversary", choices=POLICIES, default="RoundRobin")
    g.add_argument("--pattern", help="pattern text file to use instead of a random pattern")
    g.add_argument("--out", help="output path (default stdout)")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="simulate a scenario")
    r.add_argument("scenario")
    r.add_argument("--seed", type=int, default=None, help="override the adversary seed")
    r.add_argument("--budget", type=int, default=None, help="activation budget")
    r.add_argument("--trace-out", help="write the JSON Lines trace here")
    r.add_argument("--adversary", choices=POLICIES, default=None, help="override the activation policy")
    r.add_argument("--pattern", help="pattern text file replacing the scenario's pattern")
    r.add_argument("--chord", action="store_true", help="move along chords instead of SEC arcs")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check a trace for collisions, SEC drift and formation")
    v.add_argument("trace")
    v.add_argument("--tau-match", type=float, default=1e-6, help="match tolerance, relative to the SEC radius")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("render", help="write SVG frames of a trace")
    d.add_argument("trace")
    d.add_argument("--every", type=int, default=50, help="activations per frame")
    d.add_argument("--out", required=True, help="output directory")
    d.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "seed", None) is None and args.command == "generate":
        args.seed = _default_seed()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
