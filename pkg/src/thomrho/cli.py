"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 parse or usage error,
3 mathematical error (not divisible, relation violated, map not commuting).
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import MathError, ModelError
from .grammar import parse_bundle, parse_element, parse_space, render_eta
from .poly_kernel import RingMap
from .spaces import KTHEORY, MOD2
from .theories import OpKind, total_sw
from .thom_calculus import (build_thom_model, divide_by_thom_class, rho_via_division,
                            rho_via_splitting, thom_operation)
from . import verifier

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_MATH = 3

RHO_SCHEMA = {
    "type": "object",
    "required": ["command", "inputs", "result"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "result": {
            "type": "object",
            "required": ["element", "by_division", "by_splitting", "agree"],
            "properties": {
                "element": {"type": "string"},
                "by_division": {"type": "string"},
                "by_splitting": {"type": "string"},
                "agree": {"type": "boolean"},
            },
        },
    },
}

VERIFY_SCHEMA = {
    "type": "object",
    "required": ["check", "cases", "status", "counterexample"],
    "properties": {
        "check": {"type": "string"},
        "cases": {"type": "integer", "minimum": 0},
        "status": {"enum": ["pass", "fail"]},
        "counterexample": {"type": ["object", "null"]},
    },
}


class UsageError(ModelError):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help='e.g. "CP(3)" or "RP(2) x RP(2)"')
    common.add_argument("--bundle", help='e.g. "L1 + L2" or "2*L1"')
    common.add_argument("--op", help="sq or psi:K")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--basis", choices=("x", "eta"), default="x",
                        help="display basis for K-theory classes")
    common.add_argument("--allow-degenerate", action="store_true",
                        help="accept psi:0")
    common.add_argument("--max-n", type=int, default=None,
                        help="largest projective dimension used by suite")

    parser = argparse.ArgumentParser(
        prog="thomrho",
        description="Twisting classes of cohomology operations on Thom spaces.")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("rho", parents=[common], help="compute rho_alpha(xi)")
    sub.add_parser("sw", parents=[common], help="total Stiefel-Whitney class")
    p = sub.add_parser("apply", parents=[common], help="apply an operation")
    p.add_argument("--element", required=True)
    p = sub.add_parser("thom", parents=[common], help="show the Thom-space model")
    p.add_argument("--element", help="element of the Thom ring to divide by u")
    p = sub.add_parser("verify", parents=[common], help="run one named check")
    p.add_argument("name", choices=verifier.CHECK_NAMES)
    p.add_argument("--bundle2", help="second bundle for sum-formula")
    p.add_argument("--drop-sign", action="store_true",
                   help="negative control: omit the Koszul sign in the product formula")
    p = sub.add_parser("suite", parents=[common], help="run every check")
    p.add_argument("--max-factors", type=int, default=None)
    p.add_argument("--max-summands", type=int, default=None)
    p.add_argument("--ks", default=None, help="comma-separated Adams degrees")
    return parser


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.verb} needs " + ", ".join(f"--{n}" for n in missing))


def _kind(args) -> OpKind:
    return OpKind.parse(args.op).check(args.allow_degenerate)


def _space_and_bundle(args, theory):
    space = parse_space(args.space, theory)
    bundle = parse_bundle(args.bundle, space)
    return space, bundle


def _render(element, space, basis):
    if space.theory == KTHEORY and basis == "eta":
        return render_eta(element)
    return str(element)


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def cmd_rho(args) -> int:
    _require(args, "space", "bundle", "op")
    kind = _kind(args)
    space, bundle = _space_and_bundle(args, kind.theory)
    by_division = rho_via_division(space, bundle, kind, args.allow_degenerate)
    by_splitting = rho_via_splitting(space, bundle, kind, args.allow_degenerate)
    agree = by_division == by_splitting
    shown = _render(by_division, space, args.basis)
    payload = {
        "command": "rho",
        "inputs": {"space": str(space), "bundle": str(bundle), "op": str(kind)},
        "result": {
            "element": shown,
            "by_division": _render(by_division, space, args.basis),
            "by_splitting": _render(by_splitting, space, args.basis),
            "agree": agree,
        },
    }
    headline = shown
    if space.theory == KTHEORY and args.basis == "x":
        headline = f"{shown}  (= {render_eta(by_division)})"
    text = "\n".join([
        headline,
        f"  by division:  {payload['result']['by_division']}",
        f"  by splitting: {payload['result']['by_splitting']}",
        f"  agree: {str(agree).lower()}",
    ])
    _emit(args, payload, text)
    return EXIT_OK if agree else EXIT_FAILED


def cmd_sw(args) -> int:
    _require(args, "space", "bundle")
    space, bundle = _space_and_bundle(args, MOD2)
    w = total_sw(bundle, space)
    payload = {"command": "sw",
               "inputs": {"space": str(space), "bundle": str(bundle)},
               "result": {"element": str(w)}}
    _emit(args, payload, str(w))
    return EXIT_OK


def cmd_apply(args) -> int:
    _require(args, "space", "op")
    kind = _kind(args)
    space = parse_space(args.space, kind.theory)
    element = parse_element(args.element, space.ring)
    op = kind.build(space.ring, args.allow_degenerate)
    result = op(element)
    shown = _render(result, space, args.basis)
    payload = {"command": "apply",
               "inputs": {"space": str(space), "op": str(kind), "element": str(element)},
               "result": {"element": shown}}
    _emit(args, payload, shown)
    return EXIT_OK


def cmd_thom(args) -> int:
    _require(args, "space", "bundle")
    theory = _kind(args).theory if args.op else None
    space = parse_space(args.space, theory)
    bundle = parse_bundle(args.bundle, space)
    td = build_thom_model(space, bundle)
    payload = {"command": "thom",
               "inputs": {"space": str(space), "bundle": str(bundle)},
               "result": {"base_ring": str(td.base_ring), "thom_ring": str(td.ring),
                          "u": str(td.u), "degree_of_u": td.degree_of_u}}
    lines = [f"base ring:  {td.base_ring}",
             f"Thom ring:  {td.ring}",
             f"Thom class: u = {td.u}",
             f"degree of u: {td.degree_of_u}"]
    if args.element is not None:
        element = parse_element(args.element, td.ring)
        quotient = divide_by_thom_class(element, td)
        payload["result"]["quotient"] = str(quotient)
        lines.append(f"{element} = ({quotient}) * u")
    text = "\n".join(lines)
    _emit(args, payload, text)
    return EXIT_OK


def _restriction_to_base(td):
    target = td.space.ring
    return RingMap(td.ring, target, {n: target.gen(n) for n in target.names})


def _run_check(args):
    name = args.name
    if name == "product-formula-signed":
        signed = not args.drop_sign
        if args.op is None:
            return verifier.check_product_formula_signed(signed=signed), \
                "instance: exterior Λ[s,u] ⊗ Λ[t,v], u -> u + s*u, v -> v + t*v"
        kind = _kind(args)
        n = args.max_n if args.max_n is not None else 2
        inst = verifier.line_instance(kind.theory, n, str(kind))
        return verifier.check_product_formula_signed(inst, signed=signed), \
            f"instance: two copies of L1 over {'CP' if kind.theory == KTHEORY else 'RP'}({n}), {kind}"
    if name == "operation-axioms":
        _require(args, "space", "op")
        kind = _kind(args)
        space = parse_space(args.space, kind.theory)
        return verifier.check_operation_axioms(kind.build(space.ring, args.allow_degenerate)), \
            f"space: {space}"
    _require(args, "space", "bundle", "op")
    kind = _kind(args)
    space, bundle = _space_and_bundle(args, kind.theory)
    label = f"space: {space}, bundle: {bundle}, op: {kind}"
    if name == "sum-formula":
        _require(args, "bundle2")
        bundle2 = parse_bundle(args.bundle2, space)
        return verifier.check_sum_formula(space, bundle, bundle2, kind), \
            f"{label}, second bundle: {bundle2}"
    if name == "naturality":
        maps = [m for m in verifier.naturality_maps(space.theory, len(space.factors),
                                                    max(f.n for f in space.factors))
                if m.codomain == space]
        reports = [verifier.check_naturality(m, bundle, kind) for m in maps]
        labels = [f"{m.domain} -> {m.codomain}" for m in maps]
        return verifier.merge_reports("naturality", reports, labels), label
    td = build_thom_model(space, bundle)
    op = thom_operation(td, kind, args.allow_degenerate)
    if name == "eqm":
        return verifier.check_eqm(td, op), label
    if name == "thom-module-iso":
        return verifier.check_thom_module_iso(td, op), label
    if name == "composite-module-map":
        return verifier.check_composite_module_map(td, op, _restriction_to_base(td)), label
    if name == "rho-agreement":
        return verifier.check_rho_agreement(space, bundle, kind), label
    if name == "permutation-invariance":
        return verifier.check_permutation_invariance(space, bundle, kind), label
    if name == "uniqueness":
        return verifier.check_uniqueness(td, op), label
    raise UsageError(f"unknown check {name!r}")


def cmd_verify(args) -> int:
    report, label = _run_check(args)
    lines = [str(report), f"  {label}"]
    if "rho" in report.details:
        lines.append(f"  rho = {report.details['rho']}")
    _emit(args, report.to_dict(), "\n".join(lines))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_suite(args) -> int:
    defaults = verifier.SuiteBounds()
    ks = defaults.ks
    if args.ks:
        ks = tuple(int(k) for k in args.ks.split(","))
        for k in ks:
            OpKind("psi", k).check(args.allow_degenerate)
    bounds = verifier.SuiteBounds(
        max_factors=args.max_factors or defaults.max_factors,
        max_n=defaults.max_n if args.max_n is None else args.max_n,
        max_summands=args.max_summands or defaults.max_summands,
        ks=ks)
    reports = verifier.run_suite(bounds)
    ok = all(r.passed for r in reports)
    payload = {"command": "suite", "status": "pass" if ok else "fail",
               "reports": [r.to_dict() for r in reports]}
    text = "\n".join(str(r) for r in reports)
    text += f"\nsuite: {'pass' if ok else 'fail'}"
    _emit(args, payload, text)
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "rho": cmd_rho,
    "sw": cmd_sw,
    "apply": cmd_apply,
    "thom": cmd_thom,
    "verify": cmd_verify,
    "suite": cmd_suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.verb](args)
    except MathError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
