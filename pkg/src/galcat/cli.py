"""Command-line front end.

Exit codes: 0 success, 1 semantic failure (a law fails, a stage fails), 2
usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import io
from .checks import SUITES, run_suites
from .exodromy import realize
from .funcat import check_functor, check_nat_trans
from .galois import GaloisPresentation, fundamental_category, joint_conservativity_check, pi1
from .procat import validate_procat
from .report import GalcatError, ValidationError, ValidationReport
from .strat import CANNED_DOCS, build_strata, canned_examples

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _points(text: Optional[str]):
    if text is None:
        return None
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--points expects comma-separated object indices, got {text!r}") from None


def _presentation(args, path: str) -> GaloisPresentation:
    kind, obj = io.load(path)
    g = io.as_presentation(kind, obj, _points(args.points))
    if args.generator_bound is not None:
        g = GaloisPresentation(g.base, g.fibre_points, args.generator_bound, g.max_members)
    return g


def _emit(args, payload: dict, text_lines: list[str], out) -> None:
    if args.format == "json":
        out.write(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


def _report_payload(reps: Sequence[ValidationReport]) -> dict:
    return {
        "ok": all(r.ok for r in reps),
        "reports": [
            {"subject": r.subject, "ok": r.ok, "checked": r.checked, "violations": [{"law": v.law, "witness": repr(v.witness), "detail": v.detail} for v in r.violations]}
            for r in reps
        ],
    }


def _report_lines(reps: Sequence[ValidationReport]) -> list[str]:
    lines = []
    for r in reps:
        lines.extend(r.lines())
    lines.append("result: " + ("ok" if all(r.ok for r in reps) else "FAILED"))
    return lines


# -- commands ------------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    kind, obj = io.load(args.path)
    reps = []
    if kind == "procat":
        reps.append(validate_procat(obj))
    elif kind == "functor":
        reps += [validate_procat(obj.procat), check_functor(obj)]
    elif kind == "nattrans":
        reps += [validate_procat(obj.source.procat), check_functor(obj.source), check_functor(obj.target), check_nat_trans(obj)]
    elif kind == "strata":
        rep = ValidationReport("strata")
        try:
            build_strata(obj)
        except ValidationError as exc:
            rep.add(exc.law, exc.witness, exc.detail)
        reps.append(rep)
    else:
        reps += [validate_procat(obj.base)]
        if reps[0].ok:
            reps.append(joint_conservativity_check(obj))
    reps[0].subject = reps[0].subject or kind
    _emit(args, {"kind": kind, **_report_payload(reps)}, [f"kind: {kind}"] + _report_lines(reps), out)
    return EXIT_OK if all(r.ok for r in reps) else EXIT_FAIL


def cmd_fundamental(args, out) -> int:
    g = _presentation(args, args.path)
    base = validate_procat(g.base)
    if not base.ok:
        _emit(args, _report_payload([base]), _report_lines([base]), out)
        return EXIT_FAIL
    fc = fundamental_category(g)
    p = fc.procat
    levels = []
    lines = [f"fibre points: {list(g.fibre_points)}", f"levels: {p.depth}"]
    for k, c in enumerate(p.levels):
        comp = {}
        n = c.n_objects
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if c.homs[x][y].size and c.homs[y][z].size:
                        comp[f"{x},{y},{z}"] = [list(r) for r in c.composition[x][y][z]]
        cv = {f"{i},{j}": v for (i, j), v in sorted(fc.cross_validation[k].items())}
        levels.append({"homs": c.hom_sizes(), "identities": list(c.identities), "composition": comp, "cross_validation": cv, "family_size": fc.family_sizes[k]})
        lines.append(f"level {k}: hom sizes {c.hom_sizes()}, test family of {fc.family_sizes[k]} objects")
        for key, tab in comp.items():
            lines.append(f"  compose {key}: {tab}")
        lines.append(f"  cross-validation: {cv} ok")
    _emit(args, {"fibre_points": list(g.fibre_points), "levels": levels, "cross_validated": fc.validated}, lines, out)
    return EXIT_OK


def cmd_realize(args, out) -> int:
    g = _presentation(args, args.presentation)
    kind, f = io.load(args.functor)
    if kind != "functor":
        raise UsageError(f"expected a functor document, got {kind}")
    if f.procat != pi1(g):
        msg = "functor is not defined on the fundamental category of this presentation"
        _emit(args, {"ok": False, "stage": "input", "error": msg}, [f"[input] {msg}"], out)
        return EXIT_FAIL
    try:
        tr = realize(g, f)
    except GalcatError as exc:
        stage = getattr(exc, "stage", "realize")
        _emit(args, {"ok": False, "stage": stage, "error": str(exc)}, [str(exc)], out)
        return EXIT_FAIL
    payload = {
        "ok": True,
        "cover_size": tr.cover_size,
        "blocks": [list(b) for b in tr.blocks],
        "covering_object": io.encode_functor(tr.covering_object),
        "covering_map": [list(m.table) for m in tr.covering_map.components],
        "kernel_subobject": [sorted(s) for s in tr.kernel_subobject.subset],
        "quotient": io.encode_functor(tr.quotient),
        "iso_witness": [list(m.table) for m in tr.iso_witness.components],
    }
    _emit(args, payload, tr.summary() + ["result: ok"], out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    g = _presentation(args, args.path)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reps = run_suites(g, names, seed=args.seed, window=args.window)
    payload = {"suites": names, "seed": args.seed, **_report_payload(reps)}
    lines = [f"suites: {', '.join(names)} (seed {args.seed})"] + _report_lines(reps)
    _emit(args, payload, lines, out)
    return EXIT_OK if all(r.ok for r in reps) else EXIT_FAIL


def cmd_example(args, out) -> int:
    ex = canned_examples()
    if args.name not in ex:
        raise UsageError(f"unknown example {args.name!r}; known: {', '.join(CANNED_DOCS)}")
    out.write(io.dumps(ex[args.name][0]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--points", help="comma-separated fibre points (object indices)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--window", type=int, default=6, help="size bound for searched test objects")
    common.add_argument("--generator-bound", type=int, default=None, dest="generator_bound")

    ap = argparse.ArgumentParser(prog="galcat", description="Galois categories, continuous functors and constructive exodromy on finite presentations.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", parents=[common], help="check a document's laws")
    s.add_argument("path")
    s.set_defaults(run=cmd_validate)
    s = sub.add_parser("fundamental", parents=[common], help="compute and cross-validate the fundamental category")
    s.add_argument("path")
    s.set_defaults(run=cmd_fundamental)
    s = sub.add_parser("realize", parents=[common], help="realize a functor on the fundamental category")
    s.add_argument("presentation")
    s.add_argument("functor")
    s.set_defaults(run=cmd_realize)
    s = sub.add_parser("check", parents=[common], help="run verification suites")
    s.add_argument("path")
    s.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    s.set_defaults(run=cmd_check)
    s = sub.add_parser("example", parents=[common], help="print a canned presentation document")
    s.add_argument("name")
    s.set_defaults(run=cmd_example)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.run(args, out)
    except (UsageError, io.ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GalcatError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
