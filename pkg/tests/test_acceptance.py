"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every criterion is exact (zero tolerance) and must finish inside 10 seconds.
"""

import itertools
import json
import subprocess
import sys
import time

import jsonschema
import pytest
from hypothesis import given, settings

from oracles import adams_image, cannibalistic_line, f2_line_product, koszul_word_product, monomial_word
from test_grammar import bundle_texts, space_texts
from thomrho import verifier as v
from thomrho.cli import RHO_SCHEMA, VERIFY_SCHEMA
from thomrho.grammar import parse_bundle, parse_element, parse_space, render_bundle, render_space
from thomrho.poly_kernel import RingMap, restriction_map
from thomrho.spaces import CP, KTHEORY, MOD2, RP, SpaceModel, line, truncation_inclusion
from thomrho.theories import adams, total_sw
from thomrho.thom_calculus import (
    build_thom_model,
    rho_line_closed_form,
    rho_via_division,
    rho_via_splitting,
    thom_operation,
)

TIME_LIMIT = 10.0
BOUNDS = v.SuiteBounds()


@pytest.fixture
def verdict(capsys):
    start = time.perf_counter()

    def emit(number, title, ok, detail=""):
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < TIME_LIMIT
        line_ = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} [{elapsed:.2f}s]"
        if detail:
            line_ += f" {detail}"
        with capsys.disabled():
            print("\n" + line_)
        assert ok, line_

    return emit


def _first_failure(reports):
    bad = [r for r in reports if not r.passed]
    return "" if not bad else f"{bad[0].check}: {bad[0].counterexample}"


def test_criterion_01_line_bundle_formula(verdict):
    mismatches = []
    for k, n in itertools.product(range(1, 7), range(1, 7)):
        space = SpaceModel((CP(n),), KTHEORY)
        by_division = rho_via_division(space, line(1), f"psi:{k}")
        closed = rho_line_closed_form(k, 1, space)
        dense = [by_division.coefficient((j,)) for j in range(n + 1)]
        if by_division != closed or dense != cannibalistic_line(k, n):
            mismatches.append((k, n, str(by_division), str(closed)))
    verdict(1, "rho(L1, psi^k) by division equals 1 + eta + ... + eta^(k-1), k,N in 1..6",
            not mismatches, str(mismatches[:1]) if mismatches else "36 cases")


def test_criterion_02_adams_on_line_class(verdict):
    mismatches = []
    for k, n in itertools.product(range(1, 7), range(1, 7)):
        ring = SpaceModel((CP(n),), KTHEORY).ring
        psi = adams(ring, k)
        x = ring.gen("x")
        image = psi(x)
        ok = image == (1 + x) ** k - 1
        ok &= [image.coefficient((j,)) for j in range(n + 1)] == adams_image(k, n)
        ok &= psi(parse_element("eta - 1", ring)) == parse_element(f"eta^{k} - 1", ring)
        if not ok:
            mismatches.append((k, n, str(image)))
    verdict(2, "psi^k(eta - 1) = eta^k - 1 in K(CP(N)), k,N in 1..6",
            not mismatches, str(mismatches[:1]) if mismatches else "36 cases")


def test_criterion_03_stiefel_whitney(verdict):
    cases, mismatches = 0, []
    for count in (1, 2):
        for ns in itertools.product(range(5), repeat=count):
            space = SpaceModel(tuple(RP(n) for n in ns), MOD2)
            keep = [i for i, n in enumerate(ns) if n > 0]
            for r in (1, 2, 3):
                for combo in itertools.combinations_with_replacement(range(count), r):
                    bundle = line(*(i + 1 for i in combo))
                    by_division = rho_via_division(space, bundle, "sq")
                    by_splitting = rho_via_splitting(space, bundle, "sq")
                    sw = total_sw(bundle, space)
                    oracle = {tuple(m[i] for i in keep) for m in f2_line_product(list(ns), combo)}
                    cases += 1
                    if not (by_division == by_splitting == sw and set(by_division.terms) == oracle):
                        mismatches.append((str(space), str(bundle), str(by_division), str(sw)))
    verdict(3, "Sq: division = splitting = total Stiefel-Whitney class over RP products",
            not mismatches, str(mismatches[:1]) if mismatches else f"{cases} cases")


def test_criterion_04_eqm_exhaustive(verdict):
    configs = list(v.suite_configurations(BOUNDS))
    reports = [v.check_eqm(build_thom_model(s, b), op) for s, b, op in configs]
    merged = v.merge_reports("eqm", reports, [f"{s} | {b} | {op}" for s, b, op in configs])
    ok = merged.passed and len(configs) >= 200
    verdict(4, "check_eqm over every suite configuration", ok,
            f"{len(configs)} configurations, {merged.cases} cases"
            + ("" if merged.passed else f" {merged.counterexample}"))


def test_criterion_05_module_structure(verdict):
    reports = []
    for space, bundle, op in v.suite_configurations(BOUNDS):
        td = build_thom_model(space, bundle)
        top = thom_operation(td, op)
        reports.append(v.check_thom_module_iso(td, top))
        g = RingMap(td.ring, space.ring, {n: space.ring.gen(n) for n in space.ring.names})
        reports.append(v.check_composite_module_map(td, top, g))
    # restrictions to strictly smaller truncations as further stand-ins
    for theory, kind, ops in [(KTHEORY, CP, ["psi:2", "psi:3"]), (MOD2, RP, ["sq"])]:
        for n, m in [(4, 3), (4, 2), (3, 1)]:
            td = build_thom_model(SpaceModel((kind(n - 1),), theory), line(1))
            target = SpaceModel((kind(m),), theory).ring
            for op in ops:
                reports.append(v.check_composite_module_map(td, op, restriction_map(td.ring, target)))
    td = build_thom_model(SpaceModel((RP(3),), MOD2), line(1))
    top = thom_operation(td, "sq")
    wrong = v.check_thom_module_iso(td, top, twist=v.rho(td, top) + 1)
    control_ok = (not wrong.passed) and wrong.counterexample["inputs"] == {"a": "1"}
    ok = all(r.passed for r in reports) and control_ok
    verdict(5, "Thom module isomorphism and composite module maps; perturbed twist rejected",
            ok, f"{len(reports)} reports, control witness {wrong.counterexample and wrong.counterexample['inputs']}"
            + (" " + _first_failure(reports) if not ok else ""))


def test_criterion_06_sum_formula(verdict):
    reports, repeated = [], 0
    for op in v.suite_kinds(BOUNDS):
        theory = KTHEORY if op.startswith("psi") else MOD2
        for space in v.suite_spaces(theory, BOUNDS.max_factors, BOUNDS.max_n):
            bundles = list(v.suite_bundles(space, BOUNDS.max_summands - 1))
            for b1, b2 in itertools.product(bundles, repeat=2):
                if b1.rank + b2.rank <= BOUNDS.max_summands:
                    reports.append(v.check_sum_formula(space, b1, b2, op))
                    repeated += bool(set(b1.summands) & set(b2.summands))
    example = v.check_sum_formula(SpaceModel((CP(2),), KTHEORY), line(1), line(1), "psi:2")
    ok = (all(r.passed for r in reports) and example.passed
          and example.details["rho"] == "4 + 4*x + x^2" and repeated > 0)
    verdict(6, "sum formula for every bundle pair in bounds", ok,
            f"{len(reports)} pairs, {repeated} with a repeated summand, "
            f"rho(2L1 over CP(2), psi^2) = {example.details['rho']}")


def test_criterion_07_signed_product(verdict):
    signed = v.check_product_formula_signed()
    dropped = v.check_product_formula_signed(signed=False)
    ok = (signed.passed and signed.details["rho"] == "1 + s - t - s*t"
          and signed.details["degree_of_u"] == 1
          and not dropped.passed and dropped.counterexample["inputs"] == {"k": "1"})
    verdict(7, "signed product formula on the exterior instance; sign-dropped control fails",
            ok, f"rho = {signed.details['rho']}, dropped-sign witness {dropped.counterexample}")


def test_criterion_08_naturality(verdict):
    reports = []
    for theory, kind, ops in [(KTHEORY, CP, [f"psi:{k}" for k in BOUNDS.ks]), (MOD2, RP, ["sq"])]:
        for n in range(1, 7):
            for m in range(n):
                f = truncation_inclusion(SpaceModel((kind(m),), theory), SpaceModel((kind(n),), theory))
                for op in ops:
                    for r in (1, 2):
                        reports.append(v.check_naturality(f, line(*[1] * r), op))
        for f in v.naturality_maps(theory, BOUNDS.max_factors, BOUNDS.max_n, min_factors=2):
            for op in ops:
                for bundle in v.suite_bundles(f.codomain, 2):
                    reports.append(v.check_naturality(f, bundle, op))
    ok = all(r.passed for r in reports)
    verdict(8, "naturality for truncation inclusions up to N = 6 and factor projections",
            ok, f"{len(reports)} checks" + ("" if ok else " " + _first_failure(reports)))


def _suite_rings():
    rings = {}
    for space, bundle, _ in v.suite_configurations(BOUNDS):
        td = build_thom_model(space, bundle)
        for ring in (td.base_ring, td.ring):
            if len(ring.basis) <= BOUNDS.max_basis_for_laws:
                rings[ring] = None
    return list(rings)


def _kernel_laws(ring):
    basis = ring.basis
    degrees = [g.degree for g in ring.generators]
    table = {(a, b): ring.mono_mul(a, b) for a in basis for b in basis}
    for (a, b), got in table.items():
        # Koszul oracle and graded commutativity
        sign, exps = koszul_word_product(monomial_word(a), monomial_word(b), degrees)
        expected = ((1 if ring.is_f2 else sign), exps) if ring.in_bounds(exps) else None
        if got != expected:
            return f"koszul {a}*{b}: {got} != {expected}"
        swapped = table[b, a]
        if (got is None) != (swapped is None):
            return f"commutativity {a},{b}"
        if got is not None:
            twist = 1 if ring.is_f2 else (-1) ** (ring.degree(a) * ring.degree(b))
            if got[1] != swapped[1] or got[0] != twist * swapped[0]:
                return f"commutativity {a},{b}"

    for a, b, c in itertools.product(basis, repeat=3):
        ab, bc = table[a, b], table[b, c]
        left = None if ab is None else table[ab[1], c]
        right = None if bc is None else table[a, bc[1]]
        left = None if left is None else (ab[0] * left[0], left[1])
        right = None if right is None else (bc[0] * right[0], right[1])
        if left != right:
            return f"associativity {a},{b},{c}"
    dense = ring.element({m: i + 1 for i, m in enumerate(basis)})
    for m in basis:
        mono = ring.monomial(m)
        expanded = sum((mono * ring.monomial(b) * (i + 1) for i, b in enumerate(basis)), ring.zero())
        if mono * dense != expanded:
            return f"distributivity at {m}"
    for g in ring.generators:
        x = ring.gen(g.name)
        if x ** (g.bound + 1) != 0 or x ** g.bound == 0:
            return f"truncation of {g.name}"
    return None


def test_criterion_09_kernel_laws(verdict):
    rings = _suite_rings()
    failures = [(str(r), msg) for r in rings if (msg := _kernel_laws(r))]
    verdict(9, "kernel laws on every suite ring with at most 64 basis monomials",
            not failures, str(failures[:1]) if failures else f"{len(rings)} rings")


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "thomrho", *args],
                          capture_output=True, text=True, timeout=60)
    return proc.returncode, proc.stdout


def test_criterion_10_cli(verdict):
    problems = []

    @settings(max_examples=200, deadline=None)
    @given(space_texts(), bundle_texts())
    def round_trip(space_text, bundle_text):
        if len(space_text) <= 40:
            space = parse_space(space_text)
            assert parse_space(render_space(space)) == space
        if len(bundle_text) <= 40:
            bundle = parse_bundle(bundle_text)
            assert parse_bundle(render_bundle(bundle)) == bundle

    try:
        round_trip()
    except AssertionError as exc:
        problems.append(f"round trip: {exc}")

    code, out = _cli("rho", "--space", "CP(3)", "--bundle", "L1", "--op", "psi:2")
    if code != 0 or not out.startswith("2 + x") or "agree: true" not in out:
        problems.append(f"rho example: {code} {out!r}")
    code, out = _cli("rho", "--space", "CP(3)", "--bundle", "L1", "--op", "psi:2", "--format", "json")
    data = json.loads(out)
    jsonschema.validate(data, RHO_SCHEMA)
    if data["result"]["element"] != "2 + x" or data["result"]["agree"] is not True:
        problems.append(f"rho json: {data}")

    expected_codes = [
        (0, ["sw", "--space", "RP(2) x RP(2)", "--bundle", "L1 + L2"]),
        (0, ["verify", "product-formula-signed"]),
        (1, ["verify", "product-formula-signed", "--drop-sign"]),
        (2, ["rho", "--space", "CP(-1)", "--bundle", "L1", "--op", "psi:2"]),
        (2, ["rho", "--space", "CP(1) x CP(1)", "--bundle", "L3", "--op", "psi:2"]),
        (2, ["rho", "--space", "RP(2)", "--bundle", "L1", "--op", "psi:2"]),
        (3, ["thom", "--space", "CP(2)", "--bundle", "L1", "--element", "1 + x"]),
    ]
    for want, args in expected_codes:
        code, out = _cli(*args)
        if code != want:
            problems.append(f"{args}: exit {code}, wanted {want}")
    code, out = _cli("verify", "product-formula-signed", "--format", "json")
    jsonschema.validate(json.loads(out), VERIFY_SCHEMA)
    verdict(10, "CLI round trip, exit codes and the rho example", not problems,
            "; ".join(problems))
