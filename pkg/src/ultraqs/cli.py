"""Command-line front end.  Every command prints one JSON report.

Exit codes: 0 pass, 1 a check failed (the report carries a witness),
2 usage, I/O or input-format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from ultraqs import __version__, errors
from ultraqs.ballean import (
    ball_preserving_iff_iso_check,
    enumerate_ballean,
    is_ball,
    is_ball_preserving,
    rooted_tree_isomorphic,
    tree_code,
)
from ultraqs.exact import parse_rational
from ultraqs.harness import GenConfig, gen_space, gen_tree
from ultraqs.mapping import PointMap, load_mapping
from ultraqs.modulus import inverse_modulus, parse_modulus
from ultraqs.quasisymmetry import (
    all_nested_bounds,
    bilipschitz_constant,
    check_modulus,
    envelope,
    image_ultrametric_check,
    is_one_qs,
    pointwise_bounds,
    remark_equivalences_check,
    verify_diameter_bounds,
)
from ultraqs.space import load_space
from ultraqs.tree import build_tree, load_tree

FIXTURE_ENV = "ULTRAQS_FIXTURES"

# failures of a check (exit 1) as opposed to bad input (exit 2)
CHECK_FAILURES = (errors.ModulusInfeasible, errors.PreconditionNotMet)


class Outcome:
    def __init__(self, ok: bool, result: Any = None, witnesses: list | None = None, artifact: Any = None):
        self.ok = ok
        self.result = result
        self.witnesses = witnesses or []
        self.artifact = result if artifact is None else artifact


def _path(name: str) -> Path:
    p = Path(name)
    if not p.exists() and not p.is_absolute() and os.environ.get(FIXTURE_ENV):
        alt = Path(os.environ[FIXTURE_ENV]) / p
        if alt.exists():
            return alt
    return p


def _space(name: str, *, metric: bool = False):
    return load_space(_path(name), ultrametric=not metric)


def _map(args: argparse.Namespace, *, metric_target: bool = False) -> PointMap:
    x = _space(args.X)
    y = _space(args.Y, metric=metric_target)
    if args.map is None:
        return PointMap.identity(x, y)
    return load_mapping(_path(args.map), x, y)


def _subset(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def cmd_validate(args: argparse.Namespace) -> Outcome:
    try:
        space = _space(args.space, metric=args.metric)
    except (errors.SpaceError,) as exc:
        return Outcome(False, None, [exc.to_json()])
    return Outcome(
        True,
        {"points": len(space), "ultrametric": space.is_ultrametric, "diameter": str(space.values[-1])},
    )


def cmd_tree(args: argparse.Namespace) -> Outcome:
    return Outcome(True, build_tree(_space(args.space)).to_json())


def cmd_balls(args: argparse.Namespace) -> Outcome:
    space = _space(args.space)
    if args.subset is not None:
        v = is_ball(space, _subset(args.subset))
        return Outcome(v.ok, {"is_ball": v.ok}, [] if v.ok else [v.witness])
    return Outcome(True, enumerate_ballean(space).to_json())


def cmd_envelope(args: argparse.Namespace) -> Outcome:
    return Outcome(True, envelope(_map(args)).to_json())


def cmd_check(args: argparse.Namespace) -> Outcome:
    eta = parse_modulus(args.eta)
    v = check_modulus(envelope(_map(args)), eta)
    return Outcome(v.ok, {"eta": eta.spec, "dominates": v.ok}, [] if v.ok else [v.witness])


def cmd_qs(args: argparse.Namespace) -> Outcome:
    m = _map(args, metric_target=True)
    one = is_one_qs(m)
    image = image_ultrametric_check(m)
    result: dict[str, Any] = {"one_qs": one.ok, "image_ultrametric": image.ok}
    witnesses = [w for w in (one.witness, image.witness) if w]
    if one.ok and image.ok and m.source.is_ultrametric:
        remark = remark_equivalences_check(m)
        result["remark_equivalences"] = remark.ok
        if remark.witness:
            witnesses.append(remark.witness)
    ok = image.ok and (not one.ok or result.get("remark_equivalences", True))
    if args.require_one_qs:
        ok = ok and one.ok
    return Outcome(ok, result, witnesses)


def cmd_bounds(args: argparse.Namespace) -> Outcome:
    m = _map(args)
    eta = parse_modulus(args.eta)
    if args.all_nested or args.exhaustive_subsets:
        reports = all_nested_bounds(m, eta, exhaustive_subsets=args.exhaustive_subsets)
    else:
        if not (args.A and args.B):
            raise errors.FormatError("give --A and --B, or --all-nested")
        reports = [verify_diameter_bounds(m, eta, _subset(args.A), _subset(args.B))]
    docs = [r.to_json() for r in reports]
    bad = [d for d in docs if not (d["holds"] and d["contained"])]
    return Outcome(not bad, {"eta": eta.spec, "pairs": len(docs), "reports": docs}, bad)


def cmd_pointwise(args: argparse.Namespace) -> Outcome:
    b = pointwise_bounds(_map(args), parse_modulus(args.eta), args.x, args.y)
    return Outcome(b.holds, b.to_json(), [] if b.holds else [b.to_json()])


def cmd_bilipschitz(args: argparse.Namespace) -> Outcome:
    b = bilipschitz_constant(_map(args), parse_rational(args.C))
    return Outcome(b.verdict.ok, b.to_json(), [] if b.verdict.ok else [b.verdict.witness])


def cmd_invert(args: argparse.Namespace) -> Outcome:
    eta = parse_modulus(args.eta)
    dual = inverse_modulus(eta)
    values = {t: str(dual(parse_rational(t))) for t in args.at}
    return Outcome(True, {"eta": eta.spec, "inverse": dual.spec, "values": values})


def cmd_iso(args: argparse.Namespace) -> Outcome:
    ta, tb = load_tree(_path(args.A)), load_tree(_path(args.B))
    w = rooted_tree_isomorphic(ta, tb, labeled=args.labeled)
    result = {"isomorphic": w is not None, "witness": None if w is None else w.to_json()}
    witnesses = []
    if w is None:
        witnesses.append(
            {
                "reason": "canonical codes differ",
                "code_A": repr(tree_code(ta, args.labeled)),
                "code_B": repr(tree_code(tb, args.labeled)),
            }
        )
    return Outcome(w is not None, result, witnesses)


def cmd_ball_preserving(args: argparse.Namespace) -> Outcome:
    if args.map is not None:
        v = is_ball_preserving(_map(args))
        return Outcome(v.ok, {"ball_preserving": v.ok}, [] if v.ok else [v.witness])
    report = ball_preserving_iff_iso_check(_space(args.X), _space(args.Y))
    return Outcome(report.consistent and report.isomorphic, report.to_json())


def cmd_gen(args: argparse.Namespace) -> Outcome:
    if args.config:
        with open(_path(args.config), encoding="utf-8") as fh:
            config = GenConfig.from_json(json.load(fh))
    else:
        if args.seed is None or args.n is None:
            raise errors.FormatError("gen needs --seed and --n (or --config)")
        kwargs: dict[str, Any] = {"seed": args.seed, "n": args.n, "max_depth": args.depth}
        if args.labels:
            kwargs["labels"] = tuple(parse_rational(x) for x in _subset(args.labels))
        if args.min_branch is not None:
            kwargs["min_branch"] = args.min_branch
        if args.max_branch is not None:
            kwargs["max_branch"] = args.max_branch
        config = GenConfig(**kwargs)
    space = gen_space(config)
    if args.tree:
        return Outcome(True, {"config": config.to_json(), "tree": gen_tree(config).to_json()})
    return Outcome(True, {"config": config.to_json(), "space": space.to_json()}, artifact=space.to_json())


def _map_args(p: argparse.ArgumentParser, map_required: bool = False) -> None:
    p.add_argument("X", help="source space JSON")
    p.add_argument("Y", help="target space JSON")
    p.add_argument("map", nargs=None if map_required else "?", help="mapping JSON (default: identity by index)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultraqs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ultraqs {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON report")
    common.add_argument("--out", help="also write the command's artifact to this file")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def sub_parser(name: str, **kw: Any) -> argparse.ArgumentParser:
        return subparsers.add_parser(name, parents=[common], **kw)

    p = sub_parser("validate", help="validate a space file")
    p.add_argument("space")
    p.add_argument("--metric", action="store_true", help="only require a metric")
    p.set_defaults(func=cmd_validate)

    p = sub_parser("tree", help="representing tree of a space")
    p.add_argument("space")
    p.set_defaults(func=cmd_tree)

    p = sub_parser("balls", help="ballean of a space, or test one subset")
    p.add_argument("space")
    p.add_argument("--subset", help="comma-separated point names to test")
    p.set_defaults(func=cmd_balls)

    p = sub_parser("envelope", help="constraint envelope of a map")
    _map_args(p)
    p.set_defaults(func=cmd_envelope)

    p = sub_parser("check", help="does a modulus dominate the envelope")
    _map_args(p)
    p.add_argument("--eta", required=True)
    p.set_defaults(func=cmd_check)

    p = sub_parser("qs", help="order preservation, ultrametric image and equivalences")
    _map_args(p)
    p.add_argument("--require-one-qs", action="store_true", help="fail unless the map preserves distance order")
    p.set_defaults(func=cmd_qs)

    p = sub_parser("bounds", help="diameter ratio bounds for nested sets")
    _map_args(p)
    p.add_argument("--eta", required=True)
    p.add_argument("--A")
    p.add_argument("--B")
    p.add_argument("--all-nested", action="store_true", help="every nested pair of balls")
    p.add_argument("--exhaustive-subsets", action="store_true", help="every nested pair of subsets (<= 8 points)")
    p.set_defaults(func=cmd_bounds)

    p = sub_parser("pointwise", help="two-sided bound on one image distance")
    _map_args(p)
    p.add_argument("--eta", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_pointwise)

    p = sub_parser("bilipschitz", help="bi-Lipschitz constant of a linearly quasisymmetric map")
    _map_args(p)
    p.add_argument("--C", required=True)
    p.set_defaults(func=cmd_bilipschitz)

    p = sub_parser("invert", help="modulus of the inverse map")
    p.add_argument("--eta", required=True)
    p.add_argument("--at", nargs="*", default=[], help="evaluate the inverse modulus here")
    p.set_defaults(func=cmd_invert)

    p = sub_parser("iso", help="rooted-tree isomorphism of two trees (tree or space files)")
    p.add_argument("A")
    p.add_argument("B")
    p.add_argument("--labeled", action="store_true", help="also require equal labels")
    p.set_defaults(func=cmd_iso)

    p = sub_parser("ball-preserving", help="test a map, or relate trees and ball-preserving bijections")
    _map_args(p)
    p.set_defaults(func=cmd_ball_preserving)

    p = sub_parser("gen", help="seeded random ultrametric space")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--labels", help="comma-separated label pool")
    p.add_argument("--min-branch", type=int)
    p.add_argument("--max-branch", type=int)
    p.add_argument("--config", help="GenConfig JSON file instead of flags")
    p.add_argument("--tree", action="store_true", help="emit the generated tree instead of the space")
    p.set_defaults(func=cmd_gen)
    return parser


def _emit(report: dict[str, Any], pretty: bool) -> None:
    sys.stdout.write(json.dumps(report, indent=2 if pretty else None) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    start = time.perf_counter()
    func: Callable[[argparse.Namespace], Outcome] = args.func
    report: dict[str, Any] = {"command": argv, "verdict": "error", "result": None, "witnesses": []}
    code = 2
    try:
        outcome = func(args)
    except CHECK_FAILURES as exc:
        report.update(verdict="fail", witnesses=[exc.to_json()])
        code = 1
    except errors.UltraQSError as exc:
        report["witnesses"] = [exc.to_json()]
    except OSError as exc:
        report["witnesses"] = [{"code": "IOError", "message": str(exc)}]
    else:
        report.update(
            verdict="pass" if outcome.ok else "fail",
            result=outcome.result,
            witnesses=outcome.witnesses,
        )
        code = 0 if outcome.ok else 1
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(outcome.artifact, fh, indent=2)
                fh.write("\n")
    report["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    report["version"] = __version__
    _emit(report, args.pretty)
    return code


if __name__ == "__main__":
    sys.exit(main())
