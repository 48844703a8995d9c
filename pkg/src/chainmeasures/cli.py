"""Command-line front end: ``chainmeasures {analyze,extremes,verify,lemma,generate}``.

Exit codes: 0 success, 1 validation failure (bad kernel, hypothesis not met,
failed check), 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backend import DEFAULT_TOL, format_scalar
from .chain_core import (MarkovKernel, as_measure, as_observable, is_conservative_kernel,
                         joint_distribution, uniform_measure)
from .errors import ChainError, ParseError
from .extremal import (ENUMERATION_CAP, class_decomposition, extreme_invariant_measures,
                       extreme_reversible_measures, verify_theorem4)
from .fileio import kernel_to_dict, load_kernel, load_vector, read_kernel_rows
from .generators import ChainRecipe, random_corpus, realize
from .measure_props import (classify, dirichlet_form, in_G,
                            lemma8_conditions, lemma9_check, quadratic_form_rhs,
                            remark_check)

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2
SCHEMA_PATH = Path(__file__).parent / "schemas" / "analysis_report.schema.json"


class CommandFailed(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _fmt_vec(v):
    return [format_scalar(x) for x in v]


def _emit(args, payload, lines):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(lines))


def _load(args):
    """Kernel on the requested backend, plus an exact twin parsed from the
    same text (decimal strings stay exact) for extreme-point work."""
    rows, extras = read_kernel_rows(args.kernel)
    k = MarkovKernel(rows, exact=args.exact, tol=args.tolerance)
    exact = k if args.exact else MarkovKernel(rows, exact=True, tol=args.tolerance)
    return k, exact, extras


def _measure(args, k, extras, attr="measure"):
    """Measure from --measure, else one embedded in the kernel file, else uniform."""
    path = getattr(args, attr, None)
    if path:
        return as_measure(k, load_vector(path, "measure")), "file"
    if "measure" in extras:
        return as_measure(k, extras["measure"]), "embedded"
    return uniform_measure(k), "uniform"


def cmd_analyze(args):
    k, k_exact, extras = _load(args)
    m, source = _measure(args, k, extras)
    report = classify(k, m)
    sigma = joint_distribution(k, m)
    lemma7 = None
    if report.in_G:
        f = as_observable(k, list(range(k.n)))
        lhs, rhs = dirichlet_form(k, m, f), quadratic_form_rhs(sigma, f)
        lemma7 = {"f": _fmt_vec(f), "lhs": format_scalar(lhs), "rhs": format_scalar(rhs),
                  "holds": k.backend.eq(lhs, rhs)}
    extremal = verify_theorem4(k_exact).to_dict() if k.n <= ENUMERATION_CAP else None
    payload = {
        "backend": k.backend.name,
        "tolerance": k.tol,
        "kernel": {"n": k.n, "conservative": is_conservative_kernel(k),
                   "decomposition": class_decomposition(k).to_dict()},
        "measures": [{"source": source, "weights": _fmt_vec(m), "classification": report.to_dict()}],
        "extremal": extremal,
        "lemma_checks": {
            "lemma6": {"reversible": report.reversible, "sigma_symmetric": sigma.is_symmetric()},
            "lemma7": lemma7,
        },
    }
    d = report.to_dict()
    lines = [f"n = {k.n}  backend = {k.backend.name}  conservative = {payload['kernel']['conservative']}",
             f"measure ({source}): {' '.join(_fmt_vec(m))}"]
    for name in ("invariant", "reversible", "conservative_measure"):
        lines.append(f"  {name:<22} {str(d[name]):<5}  residual {d['residuals'][name]}")
    lines.append(f"  {'in_G':<22} {d['in_G']}")
    if extremal is not None:
        lines.append(f"extreme invariant measures: {len(extremal['I_e'])}; "
                     f"inclusion {extremal['checked']}_e in I_e: {extremal['inclusion_holds']}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_extremes(args):
    k, _ = load_kernel(args.kernel, exact=True, tol=args.tolerance)
    if args.set == "I":
        measures = extreme_invariant_measures(k)
    else:
        measures = extreme_reversible_measures(k, args.set)
    payload = {"set": args.set, "measures": [_fmt_vec(m) for m in measures]}
    lines = [f"{args.set}_e: {len(measures)} extreme measure(s)"]
    lines += ["  " + " ".join(_fmt_vec(m)) for m in measures]
    _emit(args, payload, lines)
    return EXIT_OK


def _verify_sources(args):
    if args.random:
        n, count, seed = args.random
        for i, recipe in enumerate(random_corpus(n, count, seed)):
            yield f"random[{i}] {recipe.kind}", realize(recipe)[0]
    elif args.recipe:
        recipe = _load_recipe(args)
        yield recipe.kind, realize(recipe)[0]
    elif args.kernel:
        k, _ = load_kernel(args.kernel, exact=True, tol=args.tolerance)
        yield args.kernel, k
    else:
        raise CommandFailed(EXIT_INVALID, "verify needs a kernel file, --recipe or --random")


def cmd_verify(args):
    rows, lines, failure = [], [], None
    total = passed = 0
    for label, k in _verify_sources(args):
        rep = verify_theorem4(k)
        total += 1
        passed += rep.inclusion_holds
        set_name = rep.checked + "_e"
        checked = rep.R_e if rep.checked == "R" else rep.G_e
        rows.append({"label": label, "n": k.n, "checked": rep.checked,
                     "inclusion_holds": rep.inclusion_holds, "vacuous": rep.vacuous,
                     "witnesses": [[i, j] for i, j in rep.witnesses]})
        note = f"{set_name} empty (vacuous)" if rep.vacuous else \
            ", ".join(f"{_short(checked[i])} -> I_e[{j}]" for i, j in rep.witnesses)
        lines.append(f"{'PASS' if rep.inclusion_holds else 'FAIL'}  {label}: {note}")
        if not rep.inclusion_holds and failure is None:
            failure = kernel_to_dict(k, report=rep.to_dict())
    summary = f"{passed}/{total} inclusion verified"
    lines.append(summary)
    payload = {"summary": summary, "passed": passed, "total": total, "kernels": rows,
               "counterexample": failure}
    _emit(args, payload, lines)
    return EXIT_OK if failure is None else EXIT_INVALID


def _short(m):
    return "(" + ", ".join(_fmt_vec(m)) + ")"


def cmd_lemma(args):
    k, _, extras = _load(args)
    m, _ = _measure(args, k, extras)
    if not in_G(k, m):
        raise CommandFailed(EXIT_INVALID, "HypothesisViolated: measure is not conservative reversible")
    lemma = args.lemma
    if args.function:
        vec = load_vector(args.function, "function")
    elif lemma in ("9", "remark"):
        vec = [1] * k.n
    else:
        vec = list(range(k.n))
    if lemma == "7":
        f = as_observable(k, vec)
        lhs = dirichlet_form(k, m, f)
        rhs = quadratic_form_rhs(joint_distribution(k, m), f)
        holds = k.backend.eq(lhs, rhs)
        payload = {"lemma": "7", "lhs": format_scalar(lhs), "rhs": format_scalar(rhs), "holds": holds}
        lines = [f"LHS = {payload['lhs']}", f"RHS = {payload['rhs']}", f"identity holds: {holds}"]
    elif lemma == "8":
        r = lemma8_conditions(k, m, vec)
        holds = r.all_equal
        payload = {"lemma": "8", "a": r.a, "b": r.b, "c": r.c, "d": r.d, "holds": holds}
        lines = [f"({c}) {getattr(r, c)}" for c in "abcd"] + [f"equivalent: {holds}"]
    else:
        rho = vec
        if args.normalize:
            rho = list(_rescale(k, m, rho))
        if lemma == "9":
            r = lemma9_check(k, m, rho)
            first, second = ("rho_m_in_G", r.in_G), ("rho_m_in_I", r.in_I)
        else:
            r = remark_check(k, m, rho)
            first, second = ("rho_m_in_G", r.in_G), ("rho_constant_on_sigma", r.constant_on_sigma)
        holds = first[1] == second[1]
        payload = {"lemma": lemma, first[0]: first[1], second[0]: second[1], "holds": holds}
        lines = [f"{first[0]} = {first[1]}", f"{second[0]} = {second[1]}", f"equivalent: {holds}"]
    _emit(args, payload, lines)
    return EXIT_OK if holds else EXIT_INVALID


def _rescale(k, m, rho):
    rho = as_observable(k, rho)
    mass = sum((r * w for r, w in zip(rho, m)), k.backend.zero())
    if k.backend.is_zero(mass):
        raise ChainError("density integrates to zero against the measure")
    return rho / mass


def _read_text(source):
    if source.lstrip().startswith("{"):
        return source
    return Path(source).read_text(encoding="utf-8")


def _load_recipe(args) -> ChainRecipe:
    """Parse --recipe / positional recipe; random kinds without a seed take --seed."""
    try:
        data = json.loads(_read_text(args.recipe))
    except json.JSONDecodeError as exc:
        raise ParseError(f"recipe line {exc.lineno}, column {exc.colno}", exc.msg) from None
    if isinstance(data, dict) and str(data.get("kind", "")).startswith("random_"):
        data.setdefault("seed", args.seed)
    return ChainRecipe.from_dict(data)


def cmd_generate(args):
    recipe = _load_recipe(args)
    k, known = realize(recipe)
    extras = {"recipe": recipe.to_dict()}
    if known is not None:
        extras["measure"] = _fmt_vec(known)
    text = json.dumps(kernel_to_dict(k, **extras), indent=2) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
        if not args.json:
            print(f"wrote {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=DEFAULT_TOL,
                        help="float-backend tolerance (default 1e-9)")
    common.add_argument("--exact", action="store_true", help="use exact rational arithmetic")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for commands that sample")

    ap = argparse.ArgumentParser(prog="chainmeasures",
                                 description="Measure classes and extreme points of finite Markov chains.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="classify a measure for a kernel")
    p.add_argument("kernel")
    p.add_argument("--measure", help="measure file (JSON array or whitespace vector)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("extremes", parents=[common], help="list extreme measures of I, R or G")
    p.add_argument("kernel")
    p.add_argument("--set", choices=("I", "R", "G"), default="I")
    p.set_defaults(func=cmd_extremes)

    p = sub.add_parser("verify", parents=[common],
                       help="check that extreme reversible measures are extreme invariant")
    p.add_argument("kernel", nargs="?")
    p.add_argument("--recipe", help="recipe JSON file or inline JSON")
    p.add_argument("--random", nargs=3, type=int, metavar=("N", "COUNT", "SEED"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lemma", parents=[common], help="check one of the lemma identities")
    p.add_argument("kernel")
    p.add_argument("--measure")
    p.add_argument("--function", help="observable f (lemmas 7, 8) or density rho (9, remark)")
    p.add_argument("--lemma", choices=("7", "8", "9", "remark"), required=True)
    p.add_argument("--normalize", action="store_true", help="rescale rho so rho*m has mass one")
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("generate", parents=[common], help="realize a chain recipe to a kernel file")
    p.add_argument("recipe", help="recipe JSON file or inline JSON")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_generate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ChainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
