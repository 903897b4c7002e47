"""Command-line interface.

Structured results go to standard output as JSON with sorted keys; short
human-readable summaries go to standard error.  Exit codes: 0 success or
verdict "related", 1 verdict "distinguished" (or a failed covering check),
2 malformed input, 3 precondition violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .covering import (
    GraphMap,
    cyclic_cover,
    lift_state_path,
    universal_cover_truncation,
    verify_covering,
)
from .environments import Environment, trace_of
from .equivalence import check_equiv_sampled, compute_bisimulation
from .errors import PreconditionError, ValidationError
from .gallery import write_gallery
from .generate import random_voltages
from .rationals import to_pair
from .signals import ControlSignal, distance, geodesic


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _load_environment(path: str) -> Environment:
    return Environment.from_json(_load_json(path))


def _load_signal(path: str) -> ControlSignal:
    return ControlSignal.from_json(_load_json(path))


def _load_map(path: str, source: Environment) -> GraphMap:
    return GraphMap.from_json(_load_json(path), source=source.graph)


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"not a rational number: {text!r}") from exc


def _emit(data) -> None:
    print(json.dumps(data, sort_keys=True, indent=2))


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_trace(args) -> int:
    env = _load_environment(args.environment)
    signal = _load_signal(args.signal)
    trace = trace_of(env, signal)
    _emit(trace.to_json())
    _note(
        f"trace over {trace.duration}: {len(trace.segments)} segments, "
        f"{len(trace.events)} events"
    )
    return 0


def cmd_metric(args) -> int:
    a = _load_signal(args.first)
    b = _load_signal(args.second)
    d = distance(a, b)
    _emit({"distance": to_pair(d)})
    _note(f"distance = {d}")
    return 0


def cmd_geodesic(args) -> int:
    a = _load_signal(args.first)
    b = _load_signal(args.second)
    s = _parse_rational(args.at)
    point = geodesic(a, b, s)
    _emit(point.to_json())
    _note(f"geodesic point at s = {s}, duration {point.duration}")
    return 0


def cmd_check_cover(args) -> int:
    source = _load_environment(args.source)
    target = _load_environment(args.target)
    mapping = _load_map(args.map, source)
    cert = verify_covering(mapping, source, target, skip_star_at=args.skip_star)
    _emit(cert.to_json())
    _note("covering conditions hold" if cert.positive else "not a covering")
    return 0 if cert.positive else 1


def cmd_lift(args) -> int:
    source = _load_environment(args.source)
    target = _load_environment(args.target)
    mapping = _load_map(args.map, source)
    signal = _load_signal(args.signal)
    lifted = lift_state_path(mapping, source, target, signal)
    _emit(lifted.to_json())
    _note(f"lifted trajectory: {len(lifted.legs)} legs over {lifted.duration}")
    return 0


def cmd_gen_cyclic(args) -> int:
    env = _load_environment(args.environment)
    if args.k < 1:
        raise PreconditionError(f"cover order must be at least 1, got {args.k}")
    if args.voltages is not None:
        try:
            voltages = [int(part) for part in args.voltages.split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad voltage list {args.voltages!r}") from exc
    else:
        import random

        voltages = random_voltages(random.Random(args.seed), env.graph, args.k)
    cover, projection = cyclic_cover(env, args.k, voltages)
    _emit(
        {
            "environment": cover.to_json(),
            "projection": projection.to_json(),
            "voltages": voltages,
        }
    )
    _note(f"order-{args.k} cyclic cover: {len(cover.graph.vertices)} vertices")
    return 0


def cmd_gen_universal(args) -> int:
    env = _load_environment(args.environment)
    radius = _parse_rational(args.radius)
    cover, projection, boundary = universal_cover_truncation(env, radius)
    _emit(
        {
            "environment": cover.to_json(),
            "projection": projection.to_json(),
            "boundary": sorted(boundary),
        }
    )
    _note(
        f"universal cover ball of radius {radius}: "
        f"{len(cover.graph.vertices)} vertices, {len(boundary)} boundary"
    )
    return 0


def _verdict_exit(verdict_json: dict, note: str) -> int:
    _emit(verdict_json)
    _note(note)
    return 0 if verdict_json["verdict"] == "related" else 1


def cmd_equiv(args) -> int:
    a = _load_environment(args.first)
    b = _load_environment(args.second)
    verdict = check_equiv_sampled(
        a, b, max_len=args.max_len, n_random=args.random, seed=args.seed
    )
    note = (
        "no divergence found (sampled check only)"
        if not verdict.distinguished
        else f"distinguished at t = {verdict.divergence}"
    )
    return _verdict_exit(verdict.to_json(), note)


def cmd_bisim(args) -> int:
    a = _load_environment(args.first)
    b = _load_environment(args.second)
    result = compute_bisimulation(a, b)
    note = (
        f"related: {len(result.relation)} state pairs"
        if result.related
        else f"distinguished by a length-{len(result.witness.pieces)} signal at t = {result.divergence}"
    )
    return _verdict_exit(result.to_json(), note)


def cmd_distinguish(args) -> int:
    a = _load_environment(args.first)
    b = _load_environment(args.second)
    verdict = check_equiv_sampled(
        a, b, max_len=args.max_len, n_random=args.random, seed=args.seed
    )
    note = (
        f"witness found, divergence at t = {verdict.divergence}"
        if verdict.distinguished
        else f"no witness up to length {args.max_len}"
    )
    return _verdict_exit(verdict.to_json(), note)


def cmd_gallery(args) -> int:
    written = write_gallery(args.out, dot=not args.no_dot)
    _emit({"written": written})
    _note(f"wrote {len(written)} files to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertrace",
        description="Exact tools for telling apart sensor-driven graph environments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="sensor trace of a signal in an environment")
    p.add_argument("environment")
    p.add_argument("signal")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("metric", help="exact distance between two signals")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("geodesic", help="point on the geodesic between two signals")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--at", default="1/2", help="parameter s in [0, 1], e.g. 1/3")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("check-cover", help="grade a candidate covering map")
    p.add_argument("map")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--skip-star", action="append", default=[], metavar="VERTEX",
                   help="skip the star condition at this vertex (truncated covers)")
    p.set_defaults(func=cmd_check_cover)

    p = sub.add_parser("lift", help="lift a signal's trajectory through a covering")
    p.add_argument("map")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("signal")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("gen-cyclic", help="cyclic cover from voltages")
    p.add_argument("environment")
    p.add_argument("k", type=int)
    p.add_argument("--voltages", help="comma-separated, one per edge, e.g. 0,0,1")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_cyclic)

    p = sub.add_parser("gen-universal", help="truncated universal cover")
    p.add_argument("environment")
    p.add_argument("radius", help="positive rational, e.g. 6 or 13/2")
    p.set_defaults(func=cmd_gen_universal)

    p = sub.add_parser("equiv", help="sampled equivalence check")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--random", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("bisim", help="exact bisimulation on unit-length graphs")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("distinguish", help="search for a distinguishing signal")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("gallery", help="write the built-in example pairs")
    p.add_argument("--out", required=True)
    p.add_argument("--no-dot", action="store_true")
    p.set_defaults(func=cmd_gallery)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _note(f"invalid input: {exc}")
        return 2
    except PreconditionError as exc:
        _note(f"precondition violated: {exc}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
