"""Command-line driver.

Exit codes: 0 affirmative (valid / satisfiable / clean validation /
true), 1 negative (countermodel, unsatisfiable, violations, false),
2 usage or input error, 3 bound exhausted or resource cap hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import search, semantics, syntax
from .experiments import trick_experiment
from .search import (
    Verdict, decide_valid_over_frame, frame_properties, parse_frame_class,
    sat_bounded,
)
from .semantics import load_frame, load_model, validate_model, valid_in_model
from .syntax import ParseError, classify, parse, render
from .translations import Variant, fresh_scheme, kripke_trick, positivize

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3

_VERDICT_EXIT = {
    "valid": EXIT_OK,
    "satisfiable": EXIT_OK,
    "countermodel": EXIT_NEGATIVE,
    "unsatisfiable_up_to_bound": EXIT_NEGATIVE,
    "bound_exhausted": EXIT_EXHAUSTED,
}


class UsageError(Exception):
    pass


def _read_formula(arg: str) -> syntax.Formula:
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            arg = fh.read()
    return parse(arg)


def _read_corpus(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.split("#", 1)[0].strip() for line in fh]
    return [line for line in lines if line]


def _parse_assignment(text: str) -> dict:
    sigma = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        if "=" not in item:
            raise UsageError(f"bad assignment entry {item!r}; expected var=ind")
        var, ind = item.split("=", 1)
        sigma[var.strip()] = ind.strip()
    return sigma


def _emit(payload: dict, human: str, as_json: bool):
    print(json.dumps(payload, sort_keys=True, indent=2) if as_json else human)


def _emit_verdict(verdict: Verdict, as_json: bool) -> int:
    if as_json:
        print(verdict.to_json())
    else:
        print(verdict.outcome)
        for warning in verdict.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        if verdict.model is not None:
            print(f"world: {verdict.world}")
            print(f"assignment: {verdict.assignment}")
            print(json.dumps(semantics.model_to_dict(verdict.model),
                             sort_keys=True, indent=2))
    return _VERDICT_EXIT[verdict.outcome]


def _max_steps(args) -> int | None:
    if args.max_steps is not None:
        return args.max_steps
    env = os.environ.get("MONOTRICK_MAX_STEPS")
    return int(env) if env else None


def _cmd_parse(args) -> int:
    f = _read_formula(args.formula)
    _emit(syntax.to_dict(f), render(f), args.json)
    return EXIT_OK


def _cmd_classify(args) -> int:
    report = classify(_read_formula(args.formula))
    human = "\n".join(f"{k}: {v}" for k, v in report.to_dict().items())
    _emit(report.to_dict(), human, args.json)
    return EXIT_OK


def _cmd_translate(args) -> int:
    f = _read_formula(args.formula)
    variant = Variant(args.variant)
    if args.positivize:
        from .translations import fresh_letter
        f = positivize(f, fresh_letter(f, "p_pos"))
    g = kripke_trick(f, variant, fresh_scheme(f))
    _emit({"formula": render(g)}, render(g), args.json)
    return EXIT_OK


def _cmd_validate(args) -> int:
    model = load_model(args.model)
    violations = validate_model(model)
    payload = {"violations": [{"name": v.name, "witness": v.witness}
                              for v in violations]}
    human = "ok" if not violations else "\n".join(str(v) for v in violations)
    _emit(payload, human, args.json)
    return EXIT_OK if not violations else EXIT_NEGATIVE


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    violations = validate_model(model)
    if violations:
        raise UsageError("model fails validation: " + str(violations[0]))
    sigma = _parse_assignment(args.assign or "")
    value = semantics.evaluate(model, args.world, sigma, _read_formula(args.formula))
    _emit({"value": value}, "true" if value else "false", args.json)
    return EXIT_OK if value else EXIT_NEGATIVE


def _cmd_check(args) -> int:
    model = load_model(args.model)
    violations = validate_model(model)
    if violations:
        raise UsageError("model fails validation: " + str(violations[0]))
    ok, witness = valid_in_model(model, _read_formula(args.formula))
    if ok:
        _emit({"valid": True}, "valid", args.json)
        return EXIT_OK
    w, sigma = witness
    _emit({"valid": False, "world": w, "assignment": sigma},
          f"invalid at world {w} under {sigma}", args.json)
    return EXIT_NEGATIVE


def _cmd_sat(args) -> int:
    verdict = sat_bounded(
        _read_formula(args.formula),
        parse_frame_class(args.frame_class),
        world_bound=args.worlds,
        domain_bound=args.domain,
        mode=args.mode,
        eq_principle=args.eq,
        constant_domains=args.constant,
        workers=args.workers,
        max_steps=_max_steps(args),
    )
    return _emit_verdict(verdict, args.json)


def _cmd_decide(args) -> int:
    verdict = decide_valid_over_frame(
        load_frame(args.frame),
        _read_formula(args.formula),
        domain_bound=args.domain,
        mode=args.mode,
        eq_principle=args.eq,
        constant_domains=args.constant,
        workers=args.workers,
        max_steps=_max_steps(args),
    )
    return _emit_verdict(verdict, args.json)


def _cmd_frame_props(args) -> int:
    report = frame_properties(load_frame(args.frame))
    human = "\n".join(f"{k}: {v}" for k, v in report.to_dict().items())
    _emit(report.to_dict(), human, args.json)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    report = trick_experiment(_read_corpus(args.corpus), Variant(args.variant),
                              args.size)
    human = (f"variant {report.variant}: {report.agreement} agreements over "
             f"{report.corpus_size} formulas x {report.structure_count} "
             f"structures; {len(report.disagreements)} disagreements; "
             f"{len(report.skipped)} skipped; {report.wall_time:.2f}s")
    _emit(report.to_dict(), human, args.json)
    return EXIT_OK if not report.disagreements else EXIT_NEGATIVE


def _cmd_separate(args) -> int:
    report = search.eq_separation_search(args.worlds, args.domain,
                                         max_steps=_max_steps(args))
    d = report.to_dict()
    human = "\n".join(f"{key}: " + (
        "not found within bounds" if isinstance(d[key], str)
        else f"{d[key]['formula']} on frame {d[key]['frame']['access']} "
             f"({d[key]['mode']})")
        for key in ("eq3_not_eq2", "eq2_not_eq1"))
    _emit(d, human, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monotrick",
        description="Kripke-trick translations, Kripke semantics with "
                    "equality principles, and bounded finite-model search.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="emit JSON output")
        p.add_argument("--max-steps", type=int, default=None,
                       help="enumeration step cap (default: MONOTRICK_MAX_STEPS)")
        return p

    p = add("parse", _cmd_parse, help="parse a formula and pretty-print it")
    p.add_argument("formula")

    p = add("classify", _cmd_classify, help="fragment report for a formula")
    p.add_argument("formula")

    p = add("translate", _cmd_translate, help="apply a Kripke-trick variant")
    p.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    p.add_argument("--positivize", action="store_true",
                   help="replace negations by implications to a fresh letter first")
    p.add_argument("formula")

    p = add("validate", _cmd_validate, help="check model-file invariants")
    p.add_argument("--model", required=True)

    p = add("eval", _cmd_eval, help="evaluate a formula at a world")
    p.add_argument("--model", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("--assign", default="", help="e.g. x=a,y=b")
    p.add_argument("formula")

    p = add("check", _cmd_check, help="validity of a formula in a model")
    p.add_argument("--model", required=True)
    p.add_argument("formula")

    p = add("sat", _cmd_sat, help="bounded satisfiability over a frame class")
    p.add_argument("--mode", choices=("modal", "int"), default="modal")
    p.add_argument("--class", dest="frame_class", default="",
                   help="comma-separated frame properties, e.g. reflexive,alt_2")
    p.add_argument("--worlds", type=int, required=True)
    p.add_argument("--domain", type=int, required=True)
    p.add_argument("--eq", choices=("eq1", "eq2", "eq3"), default="eq3")
    p.add_argument("--constant", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("formula")

    p = add("decide", _cmd_decide, help="validity over a fixed finite frame")
    p.add_argument("--frame", required=True)
    p.add_argument("--domain", type=int, default=None)
    p.add_argument("--mode", choices=("modal", "int"), default="modal")
    p.add_argument("--eq", choices=("eq1", "eq2", "eq3"), default="eq3")
    p.add_argument("--constant", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("formula")

    p = add("frame-props", _cmd_frame_props, help="frame property report")
    p.add_argument("--frame", required=True)

    p = add("experiment", _cmd_experiment,
            help="translation-faithfulness experiment over a corpus file")
    p.add_argument("--variant", required=True,
                   choices=(Variant.DIAMOND2.value, Variant.NEG_DIAMOND1.value))
    p.add_argument("--size", type=int, required=True)
    p.add_argument("corpus")

    p = add("separate", _cmd_separate,
            help="search small frames for equality-principle separations")
    p.add_argument("--worlds", type=int, default=3)
    p.add_argument("--domain", type=int, default=2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError, ValueError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
