"""Command-line front end.

Exit codes: 0 success / holds / valid at bound / proof ok; 1 refuted /
countermodel found / proof error; 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import EXPERIMENTS, run_experiment
from .formula import ParseError, parse, render, subformulas
from .logics import LOGIC_IDS, logic_spec
from .model import Model, ModelError, check_conditions, class_names, parse_class, validate
from .proof import Derivation, DerivationError, check_derivation
from .search import SearchConfig, SearchError, find_countermodel
from .semantics import extensions


class InputError(Exception):
    pass


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(text)


def _frame_class(args):
    if args.logic and args.cls:
        raise InputError("--logic and --class are mutually exclusive")
    if args.logic:
        try:
            return args.logic, logic_spec(args.logic).frame_class
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
    if args.cls is None:
        raise InputError("one of --logic or --class is required")
    try:
        return None, parse_class(args.cls)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_parse(args) -> int:
    f = parse(args.formula)
    _emit(args, {"input": args.formula, "formula": render(f)}, render(f))
    return 0


def cmd_eval(args) -> int:
    m = Model.load(args.model)
    problems = validate(m)
    if problems:
        raise InputError("invalid model: " + "; ".join(map(str, problems)))
    if args.world not in m.index:
        raise InputError(f"unknown world {args.world!r}")
    f = parse(args.formula)
    memo = extensions(m, f)
    forced = bool(memo[f] >> m.index[args.world] & 1)
    exts = {render(g): list(m.names(memo[g])) for g in subformulas(f)}
    report = {"query": render(f), "world": args.world, "forced": forced, "extensions": exts}
    verb = "forces" if forced else "refutes"
    lines = [f"{args.world} {verb} {render(f)}"]
    lines += [f"  V({k}) = {{{', '.join(v)}}}" for k, v in exts.items()]
    _emit(args, report, "\n".join(lines))
    return 0 if forced else 1


def cmd_check_model(args) -> int:
    m = Model.load(args.file)
    problems = validate(m)
    report = {"violations": [p.message for p in problems]}
    lines = [f"violation: {p.message}" for p in problems] or ["model is well-formed"]
    failed = bool(problems)
    if args.cls and not problems:
        verdicts = check_conditions(m, parse_class(args.cls))
        report["conditions"] = {}
        for c in sorted(verdicts, key=lambda c: list(type(c)).index(c)):
            w = verdicts[c]
            report["conditions"][c.value] = "holds" if w is None else w.to_json()
            lines.append(f"{c.value}: holds" if w is None else w.describe())
            failed |= w is not None
    _emit(args, report, "\n".join(lines))
    return 1 if failed else 0


def _search(args, sampled) -> int:
    logic, fc = _frame_class(args)
    f = parse(args.formula)
    cfg = SearchConfig(max_worlds=args.max_worlds, frame_class=fc, sampled=sampled,
                       min_worlds=getattr(args, "min_worlds", 1), workers=getattr(args, "workers", 1))
    out = find_countermodel(f, cfg)
    report = {
        "query": render(f), "logic": logic, "class": class_names(fc), "bound": args.max_worlds,
        "mode": cfg.mode,
    }
    if sampled:
        report["seed"], report["count"] = sampled
    report["outcome"] = out.outcome
    if not out.valid:
        report["model"] = out.model.to_json()
        report["witness"] = out.witness
        report["extensions"] = out.extensions
    report["stats"] = {"models_checked": out.models_checked}
    if args.timing:
        report["stats"]["elapsed_ms"] = round(out.elapsed_ms, 3)
    if out.valid:
        text = f"valid at bound {args.max_worlds}, {out.models_checked} models checked"
    else:
        text = (f"countermodel found after {out.models_checked} models: {out.witness} refutes {render(f)}\n"
                + json.dumps(out.model.to_json(), indent=2))
    _emit(args, report, text)
    return 0 if out.valid else 1


def cmd_valid(args) -> int:
    return _search(args, tuple(args.sampled) if args.sampled else None)


def cmd_countermodel(args) -> int:
    return _search(args, None)


def cmd_prove(args) -> int:
    d = Derivation.load(args.file)
    try:
        check_derivation(d)
    except DerivationError as exc:
        _emit(args, {"ok": False, "line": exc.line, "reason": exc.reason}, f"derivation error: {exc}")
        return 1
    n = len(d.lines)
    _emit(args, {"ok": True, "lines": n, "conclusion": render(d.conclusion)}, f"derivation ok ({n} line{'' if n == 1 else 's'})")
    return 0


_REFUTED = ("countermodel", "counterexample", "non-up-set witness", "not sound")


def cmd_experiment(args) -> int:
    fc = parse_class(args.cls) if args.cls else frozenset()
    report = run_experiment(args.name, SearchConfig(max_worlds=args.max_worlds, frame_class=fc))
    lines = [f"{args.name}: {report['verdict']} ({report['models_checked']} models, bound {args.max_worlds})"]
    if "model" in report:
        lines.append(json.dumps(report["model"], indent=2))
    _emit(args, report, "\n".join(lines))
    return 1 if any(tag in report["verdict"] for tag in _REFUTED) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pnmodal", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and pretty-print a formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula at a world")
    p.add_argument("--model", required=True)
    p.add_argument("--world", required=True)
    p.add_argument("formula")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check-model", parents=[common], help="validate a model and frame conditions")
    p.add_argument("file")
    p.add_argument("--class", dest="cls")
    p.set_defaults(func=cmd_check_model)

    for name, func in (("valid", cmd_valid), ("countermodel", cmd_countermodel)):
        p = sub.add_parser(name, parents=[common], help=f"{name} search at a bound")
        p.add_argument("formula")
        p.add_argument("--logic", choices=LOGIC_IDS)
        p.add_argument("--class", dest="cls")
        p.add_argument("--max-worlds", type=int, default=2)
        p.add_argument("--timing", action="store_true", help="include elapsed time in the report")
        if name == "valid":
            p.add_argument("--sampled", nargs=2, type=int, metavar=("SEED", "COUNT"))
            p.add_argument("--min-worlds", type=int, default=1)
            p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=func)

    p = sub.add_parser("prove", parents=[common], help="check a derivation file")
    p.add_argument("--file", required=True)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    p.add_argument("name", choices=sorted(EXPERIMENTS))
    p.add_argument("--max-worlds", type=int, default=2)
    p.add_argument("--class", dest="cls")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ParseError, ModelError, SearchError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
