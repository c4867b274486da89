"""Command-line interface.

Every subcommand reads JSON files, prints one machine-readable JSON report
to stdout, and exits 0 on success, 1 when the input is rejected on domain
grounds (failed validation, bad files, cap violations), 2 on internal
errors.  Rationals travel as "a/b" strings throughout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

from . import randgen
from .coalition import C_SIDE, Coalition, induce
from .corpus import build_corpus
from .errors import RespgamesError
from .gamejson import (
    SIDE_IDS,
    dumps,
    game_from_dict,
    game_to_dict,
    play_from_dict,
    play_to_dict,
    profile_from_dict,
    strategy_to_dict,
)
from .games import GameTree, check_perfect_recall, require_valid, validate_game
from .rational import rat_str
from .responsibility import (
    BackwardContext,
    is_responsible,
    minimal_responsible_coalitions,
    normalize_kind,
    property_strategic,
)
from .shapley import responsibility_values
from .solver import game_value


def _read_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise RespgamesError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise RespgamesError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None


def _load_game(path: str) -> GameTree:
    return game_from_dict(_read_json(path))


def _emit(report: dict[str, Any], fmt: str) -> None:
    if fmt == "table":
        for key, value in report.items():
            print(f"{key}: {json.dumps(value, sort_keys=True)}")
    else:
        sys.stdout.write(dumps(report))


def _context_from_args(g: GameTree, args) -> BackwardContext | None:
    play = None
    profile = None
    if getattr(args, "play", None):
        play = play_from_dict(g, _read_json(args.play))
    if getattr(args, "profile", None):
        profile = profile_from_dict(_read_json(args.profile))
    if play is None:
        return None
    return BackwardContext(play=play, profile=profile)


def cmd_validate(args) -> int:
    path = args.game or args.game_pos
    if path is None:
        raise RespgamesError("validate needs a game file")
    g = _load_game(path)
    report = validate_game(g)
    _emit(
        {
            "ok": report.ok,
            "violations": [
                {"code": v.code, "subject": v.subject, "message": v.message}
                for v in report.violations
            ],
        },
        args.format,
    )
    return 0 if report.ok else 1


def cmd_recall(args) -> int:
    g = _load_game(args.game)
    require_valid(g)
    ok, witnesses = check_perfect_recall(g)
    _emit(
        {
            "ok": ok,
            "violations": [
                {"player": p, "info_set": i, "nodes": list(pair)}
                for p, i, pair in witnesses
            ],
        },
        args.format,
    )
    return 0 if ok else 1


def cmd_induce(args) -> int:
    g = _load_game(args.game)
    require_valid(g)
    coalition = Coalition.parse(args.coalition)
    ig = induce(g, coalition, refine=not args.no_refine)
    report = game_to_dict(ig.game)
    report["origin"] = ig.origin
    report["info_set_origin"] = {
        iset: src for iset, (src, _) in ig.info_set_origin.items()
    }
    _emit(report, args.format)
    return 0


def cmd_value(args) -> int:
    g = _load_game(args.game)
    require_valid(g)
    side = SIDE_IDS.get(args.side)
    if side is None:
        side = int(args.side)
    started = time.monotonic()
    value, plan = game_value(g, side, args.win)
    report: dict[str, Any] = {
        "value": rat_str(value),
        "elapsed_s": round(time.monotonic() - started, 6),
    }
    if args.plan:
        report["plan"] = plan.as_json()
        report["behavioral"] = strategy_to_dict(plan.to_behavioral(side), induced=True)
    _emit(report, args.format)
    return 0


def cmd_decide(args) -> int:
    g = _load_game(args.game)
    require_valid(g)
    kind = normalize_kind(args.kind)
    coalition = Coalition.parse(args.coalition)
    ctx = _context_from_args(g, args)
    started = time.monotonic()
    verdict = is_responsible(g, coalition, kind, ctx)
    report: dict[str, Any] = {
        "kind": kind,
        "coalition": list(coalition.members),
        "responsible": verdict,
        "elapsed_s": round(time.monotonic() - started, 6),
    }
    if kind == "s" and ctx is not None:
        holds, witness = property_strategic(g, coalition, ctx)
        report["property_holds"] = holds
        report["witness"] = witness
    _emit(report, args.format)
    return 0


def cmd_minimal(args) -> int:
    g = _load_game(args.game)
    require_valid(g)
    kind = normalize_kind(args.kind)
    ctx = _context_from_args(g, args)
    started = time.monotonic()
    found = minimal_responsible_coalitions(g, kind, ctx, cap=args.subset_cap)
    _emit(
        {
            "kind": kind,
            "coalitions": [list(c.members) for c in found],
            "elapsed_s": round(time.monotonic() - started, 6),
        },
        args.format,
    )
    return 0


def cmd_shapley(args) -> int:
    g = _load_game(args.game)
    require_valid(g)
    kind = normalize_kind(args.kind)
    ctx = _context_from_args(g, args)
    started = time.monotonic()
    vector, coop = responsibility_values(g, kind, ctx)
    _emit(
        {
            "kind": kind,
            "values": [rat_str(v) for v in vector.values],
            "total": rat_str(vector.total),
            "evaluations": coop.evaluations,
            "findings": coop.findings,
            "elapsed_s": round(time.monotonic() - started, 6),
        },
        args.format,
    )
    return 0


def cmd_causal(args) -> int:
    from .causal import (
        actual_cause,
        but_for_direct,
        but_for_via_game,
        compile_to_game,
        evaluate,
        formula_from_dict,
        label_event,
        model_from_dict,
    )

    model = model_from_dict(_read_json(args.model))
    if args.causal_cmd == "compile":
        g = compile_to_game(model)
        if args.event:
            g = label_event(model, g, formula_from_dict(_read_json(args.event)))
        _emit(game_to_dict(g), args.format)
        return 0

    context = {k: str(v) for k, v in _read_json(args.context).items()}
    formula = formula_from_dict(_read_json(args.event))
    variables = tuple(x for x in args.vars.split(",") if x)
    if args.causal_cmd == "butfor":
        actual = evaluate(model, context)
        direct = but_for_direct(
            model, context, {v: actual[v] for v in variables}, formula
        )
        via_game = but_for_via_game(model, context, variables, formula)
        _emit({"direct": direct, "via_game": via_game, "agree": direct == via_game},
              args.format)
        return 0
    if args.causal_cmd == "ac":
        actual = evaluate(model, context)
        verdict = actual_cause(
            model, context, {v: actual[v] for v in variables}, formula
        )
        _emit({"actual_cause": verdict}, args.format)
        return 0
    raise RespgamesError(f"unknown causal subcommand {args.causal_cmd!r}")


def cmd_cegs(args) -> int:
    from .cegs import cegs_from_dict, unroll, validate_cegs

    model = cegs_from_dict(_read_json(args.model))
    if args.cegs_cmd == "validate":
        violations = validate_cegs(model)
        _emit(
            {
                "ok": not violations,
                "violations": [
                    {"code": v.code, "subject": v.subject, "message": v.message}
                    for v in violations
                ],
            },
            args.format,
        )
        return 0 if not violations else 1
    if args.cegs_cmd == "unroll":
        bad = set(x for x in (args.bad or "").split(",") if x)
        g = unroll(model, args.initial, args.horizon, bad)
        _emit(game_to_dict(g), args.format)
        return 0
    raise RespgamesError(f"unknown cegs subcommand {args.cegs_cmd!r}")


def cmd_examples(args) -> int:
    corpus = build_corpus()
    if args.examples_cmd == "list":
        _emit(
            {
                name: [
                    {"kind": c.kind, "variant": c.variant}
                    for c in example.cases
                ]
                for name, example in corpus.items()
            },
            args.format,
        )
        return 0
    if args.examples_cmd == "run":
        example = corpus.get(args.name)
        if example is None:
            raise RespgamesError(f"unknown example {args.name!r}; try 'examples list'")
        case = example.case(normalize_kind(args.kind), args.variant)
        ctx = None
        if case.play_leaf is not None:
            ctx = BackwardContext(
                example.game.play_to_leaf(case.play_leaf), case.profile
            )
        started = time.monotonic()
        report: dict[str, Any] = {
            "example": example.name,
            "kind": case.kind,
            "variant": case.variant,
        }
        vector, _ = responsibility_values(example.game, case.kind, ctx)
        report["values"] = [rat_str(v) for v in vector.values]
        if case.expected_values is not None:
            report["expected"] = [rat_str(v) for v in case.expected_values]
            report["match"] = vector.values == case.expected_values
        if case.expected_minimal is not None:
            found = minimal_responsible_coalitions(example.game, case.kind, ctx)
            report["minimal"] = [list(c.members) for c in found]
            report["expected_minimal"] = [list(m) for m in case.expected_minimal]
            report["match_minimal"] = (
                tuple(c.members for c in found) == case.expected_minimal
            )
        report["elapsed_s"] = round(time.monotonic() - started, 6)
        _emit(report, args.format)
        ok = report.get("match", True) and report.get("match_minimal", True)
        return 0 if ok else 1
    raise RespgamesError(f"unknown examples subcommand {args.examples_cmd!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="respgames",
        description="Coalition responsibility in extensive form games.",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for the randomized generators used by checks")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="check the structural game invariants")
    p.add_argument("game_pos", nargs="?", metavar="GAME")
    p.add_argument("--game")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("recall", help="check perfect recall per player")
    p.add_argument("--game", required=True)
    p.set_defaults(fn=cmd_recall)

    p = sub.add_parser("induce", help="build the coalition-induced two-player game")
    p.add_argument("--game", required=True)
    p.add_argument("--coalition", required=True, help="comma-separated player ids")
    p.add_argument("--no-refine", action="store_true",
                   help="keep source information sets (diagnostic)")
    p.set_defaults(fn=cmd_induce)

    p = sub.add_parser("value", help="exact game value of a two-player game")
    p.add_argument("--game", required=True)
    p.add_argument("--side", required=True, help="C, Cbar, 1 or 2")
    p.add_argument("--win", required=True, choices=("E", "notE"))
    p.add_argument("--plan", action="store_true", help="include an optimal plan")
    p.set_defaults(fn=cmd_value)

    p = sub.add_parser("decide", help="is the coalition responsible?")
    p.add_argument("--game", required=True)
    p.add_argument("--kind", required=True, help="f, s or c")
    p.add_argument("--coalition", required=True)
    p.add_argument("--play")
    p.add_argument("--profile")
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("minimal", help="all minimal responsible coalitions")
    p.add_argument("--game", required=True)
    p.add_argument("--kind", required=True)
    p.add_argument("--play")
    p.add_argument("--profile")
    p.add_argument("--subset-cap", type=int, default=16)
    p.set_defaults(fn=cmd_minimal)

    p = sub.add_parser("shapley", help="responsibility values per player")
    p.add_argument("--game", required=True)
    p.add_argument("--kind", required=True)
    p.add_argument("--play")
    p.add_argument("--profile")
    p.set_defaults(fn=cmd_shapley)

    p = sub.add_parser("causal", help="causal-model frontend")
    p.add_argument("causal_cmd", choices=("compile", "butfor", "ac"))
    p.add_argument("--model", required=True)
    p.add_argument("--context")
    p.add_argument("--event")
    p.add_argument("--vars", default="")
    p.set_defaults(fn=cmd_causal)

    p = sub.add_parser("cegs", help="concurrent-structure frontend")
    p.add_argument("cegs_cmd", choices=("validate", "unroll"))
    p.add_argument("--model", required=True)
    p.add_argument("--initial")
    p.add_argument("--horizon", type=int, default=1)
    p.add_argument("--bad", default="")
    p.set_defaults(fn=cmd_cegs)

    p = sub.add_parser("examples", help="bundled scenario corpus")
    p.add_argument("examples_cmd", choices=("list", "run"))
    p.add_argument("--name")
    p.add_argument("--kind", default="f")
    p.add_argument("--variant")
    p.set_defaults(fn=cmd_examples)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None:
        randgen.set_default_seed(args.seed)
    try:
        return args.fn(args)
    except RespgamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - internal failure boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
