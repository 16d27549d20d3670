"""Command-line front end.

Exit codes: 0 for sat/true/pass, 1 for unsat/false/fail, 2 for usage or data
errors. Output is assembled completely before anything is printed, so a
failing command never leaves partial JSON on stdout.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import decide, gallery
from .errors import ProblogicError
from .models import check, load_model, model_from_json, model_to_dict, restrict
from .rational import format_rational, parse_rational
from .syntax import classify, depth, format_formula, local_language, parse

BUDGET_ENV = "PROBLOGIC_BUDGET"


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2)


def _budget(args) -> int:
    if args.budget is not None:
        return args.budget
    env = os.environ.get(BUDGET_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{BUDGET_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise UsageError(f"{BUDGET_ENV} must be positive")
        return value
    return decide.DEFAULT_BUDGET


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _formula(args):
    if args.formula_file is not None:
        return parse(_read(args.formula_file).strip())
    if args.formula is None:
        raise UsageError("a formula is required (-f or --formula-file)")
    return parse(args.formula)


def _model(args):
    if args.model_json is not None:
        return model_from_json(args.model_json)
    if args.model is None:
        raise UsageError("a model is required (--model or --model-json)")
    return load_model(args.model)


def cmd_parse(args) -> tuple[int, str]:
    f = _formula(args)
    info = local_language(f)
    data = {
        "formula": format_formula(f),
        "ast": repr(f),
        "depth": depth(f),
        "fragment": classify(f).value,
        "grid": info.grid,
        "propositions": sorted(info.propositions),
    }
    if args.json:
        return 0, _dumps(data)
    return 0, "\n".join(f"{k}: {v if not isinstance(v, list) else ', '.join(v)}"
                        for k, v in data.items())


def cmd_check(args) -> tuple[int, str]:
    m = _model(args)
    f = _formula(args)
    world = m.world if args.world is None else args.world
    holds = check(m, world, f)
    if args.json:
        return (0 if holds else 1), _dumps(
            {"formula": format_formula(f), "world": world, "holds": holds})
    return (0 if holds else 1), "true" if holds else "false"


def cmd_sat(args) -> tuple[int, str]:
    budget = _budget(args)
    if args.theory is not None:
        res = decide.satisfiable_theory(decide.load_theory(args.theory), budget)
    else:
        res = decide.satisfiable(_formula(args), budget)
    if args.json:
        data = {"verdict": "SAT", "witness": model_to_dict(res.witness)} if res else {"verdict": "UNSAT"}
        return (0 if res else 1), _dumps(data)
    if res:
        return 0, "SAT\n" + _dumps(model_to_dict(res.witness))
    return 1, "UNSAT"


def cmd_tighten(args) -> tuple[int, str]:
    gamma = decide.load_theory(args.theory)
    phi = _formula(args)
    r = parse_rational(args.r)
    out = decide.tighten(gamma, decide.Op(args.op), r, phi, _budget(args))
    if isinstance(out, decide.AlreadySat):
        return 0, _dumps({"result": "alreadySat"}) if args.json else "alreadySat"
    if args.json:
        return 1, _dumps({"result": "tightened", "M": format_rational(out.max_value),
                          "threshold": format_rational(out.threshold)})
    return 1, f"M = {format_rational(out.max_value)}\nr' = {format_rational(out.threshold)}"


def cmd_extend(args) -> tuple[int, str]:
    gamma = decide.load_theory(args.theory)
    universe = decide.load_theory(args.universe)
    theory = decide.extend_maximal(gamma, universe, _budget(args))
    accepted = theory[len(gamma):]
    rejected = [u for u in universe if u not in accepted]
    if args.json:
        return 0, _dumps({
            "theory": [format_formula(f) for f in theory],
            "accepted": [format_formula(f) for f in accepted],
            "rejected": [format_formula(f) for f in rejected],
        })
    lines = [format_formula(f) for f in theory]
    lines += [f"# rejected: {format_formula(f)}" for f in rejected]
    return 0, "\n".join(lines)


def cmd_restrict(args) -> tuple[int, str]:
    m = _model(args)
    return 0, _dumps(model_to_dict(restrict(m, _formula(args))))


def cmd_gallery(args) -> tuple[int, str]:
    names = list(gallery.CASES) if args.name == "all" else [args.name]
    reports = [gallery.run_case(n) for n in names]
    ok = all(r.passed for r in reports)
    if args.json:
        payload = reports[0].to_dict() if args.name != "all" else [r.to_dict() for r in reports]
        return (0 if ok else 1), _dumps(payload)
    return (0 if ok else 1), "\n".join(r.to_text() for r in reports)


def _add_formula(p, required_hint=True):
    g = p.add_mutually_exclusive_group()
    g.add_argument("-f", "--formula", help="formula in concrete syntax")
    g.add_argument("--formula-file", help="file holding one formula")


def _add_model(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--model", help="model JSON file")
    g.add_argument("--model-json", help="model JSON given inline")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--budget", type=int, default=None,
                        help=f"candidate cap (default {decide.DEFAULT_BUDGET}, env {BUDGET_ENV})")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging to stderr")

    parser = argparse.ArgumentParser(prog="problogic", description="Propositional probability logic toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="show AST, depth, fragment and grid")
    _add_formula(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", parents=[common], help="model-check a formula")
    _add_model(p)
    _add_formula(p)
    p.add_argument("--world", type=int, default=None, help="state to evaluate at (default: designated)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sat", parents=[common], help="decide satisfiability")
    g = p.add_mutually_exclusive_group()
    g.add_argument("-f", "--formula")
    g.add_argument("--formula-file")
    g.add_argument("--theory", help="theory file, one formula per line")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("tighten", parents=[common], help="tighten an unsatisfiable threshold")
    p.add_argument("--theory", required=True)
    p.add_argument("--op", choices=["L", "M"], required=True)
    p.add_argument("--r", required=True, help="threshold, e.g. 1/2")
    _add_formula(p)
    p.set_defaults(func=cmd_tighten)

    p = sub.add_parser("extend", parents=[common], help="greedy maximal satisfiable extension")
    p.add_argument("--theory", required=True)
    p.add_argument("--universe", required=True)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("restrict", parents=[common], help="restrict a model to closure atoms")
    _add_model(p)
    _add_formula(p)
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("gallery", parents=[common], help="run gallery cases")
    p.add_argument("name", nargs="?", default="all", help=f"one of: all, {', '.join(gallery.CASES)}")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)
    try:
        code, text = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ProblogicError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
