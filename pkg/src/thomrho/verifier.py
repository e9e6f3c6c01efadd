"""Exhaustive identity checks over the finite models.

Every ``check_*`` function walks a finite basis in canonical order and
returns a :class:`VerificationReport`; the first failing case in that
order is kept as the counterexample.  Checks are pure.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field

from .errors import NotCommuting, NotDivisible
from .poly_kernel import Element, Ring, RingMap, ext, external_product_ring, make_ring
from .spaces import (
    KTHEORY,
    MOD2,
    BundleDescriptor,
    CP,
    ModelMap,
    RP,
    SpaceModel,
    factor_projection,
    truncation_inclusion,
)
from .theories import (
    Operation,
    adams,
    as_kind,
    make_formal_operation,
    product_operation,
    total_sq,
    total_sw,
)
from .thom_calculus import (
    ThomData,
    base_operation,
    build_thom_model,
    divide_by_thom_class,
    external_thom_product,
    rho,
    rho_via_division,
    rho_via_splitting,
    signed_convolution,
    thom_operation,
)


@dataclass
class VerificationReport:
    check: str
    cases: int
    status: str
    counterexample: dict | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"check": self.check, "cases": self.cases, "status": self.status,
                "counterexample": self.counterexample}

        line = f"{self.check}: {self.status} ({self.cases} case{'' if self.cases == 1 else 's'})"
        line = f"{self.check}: {self.status} ({self.cases} cases)"
        if self.counterexample:
            line += f"\n  counterexample: {self.counterexample}"
        return line


class _Tally:
    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.witness = None

    def compare(self, lhs, rhs, **inputs) -> bool:
        self.cases += 1
        if lhs == rhs:
            return True
        if self.witness is None:
            self.witness = {"inputs": {k: str(v) for k, v in inputs.items()},
                            "lhs": str(lhs), "rhs": str(rhs)}
        return False

    def report(self, **details) -> VerificationReport:
        status = "pass" if self.witness is None else "fail"
        return VerificationReport(self.name, self.cases, status, self.witness, details)


def merge_reports(name: str, reports, labels=None) -> VerificationReport:
    """Combine per-configuration reports; the first failure wins."""
    reports = list(reports)
    labels = list(labels) if labels is not None else [None] * len(reports)
    cases = sum(r.cases for r in reports)
    witness = None
    for r, label in zip(reports, labels):
        if not r.passed:
            witness = dict(r.counterexample or {})
            if label is not None:
                witness["configuration"] = label
            break
    return VerificationReport(name, cases, "pass" if witness is None else "fail",
                              witness, {"configurations": len(reports)})


class TwistedAction:
    """``a -> op(a) * twist``, the generator action on the base."""

    def __init__(self, op: Operation, twist: Element):
        self.op = op
        self.twist = twist

    def __call__(self, a: Element) -> Element:
        return self.op(a) * self.twist

    def power(self, a: Element, n: int) -> Element:
        for _ in range(n):
            a = self(a)
        return a


class TermwiseMap:
    """A linear map given on basis monomials; unlisted monomials are fixed.

    Used as a negative control: nothing forces it to be multiplicative.
    """

    def __init__(self, ring: Ring, images: dict, label: str = "termwise"):
        self.ring = ring
        self.images = {tuple(m): v for m, v in images.items()}
        self.label = label

    def __call__(self, a: Element) -> Element:
        out = self.ring.zero()
        for mono, c in a.terms.items():
            out = out + self.images.get(mono, self.ring.monomial(mono)) * c
        return out


def _power(op, a: Element, n: int) -> Element:
    for _ in range(n):
        a = op(a)
    return a


def check_eqm(td: ThomData, op) -> VerificationReport:
    """``op(a*u) == (op(a)*rho) * u`` for every base basis monomial ``a``."""
    op = thom_operation(td, op)
    base_op = base_operation(td, op)
    r = rho(td, op)
    tally = _Tally("eqm")
    for a in td.base_ring.basis_elements():
        tally.compare(op(td.thom(a)), td.thom(base_op(a) * r), a=a)
    return tally.report(rho=str(r))


def check_thom_module_iso(td: ThomData, op, twist: Element | None = None,
                          seed: int = 0) -> VerificationReport:
    """The Thom map intertwines the twisted action with the plain one."""
    op = thom_operation(td, op)
    base_op = base_operation(td, op)
    r = rho(td, op) if twist is None else twist
    action = TwistedAction(base_op, r)
    tally = _Tally("thom-module-iso")
    basis = td.base_ring.basis_elements()

    # Injectivity: basis monomials go to distinct nonzero monomials.
    seen = {}
    for a in basis:
        image = td.thom(a)
        key = tuple(sorted(image.terms)) if image else None
        ok = key is not None and len(image.terms) == 1 and key not in seen
        tally.compare(ok, True, injective_at=a, image=image)
        seen[key] = a
    # Surjectivity onto the ideal u * (Thom ring).
    for mono in td.ring.basis:
        e = td.ring.monomial(mono) * td.u
        try:
            divide_by_thom_class(e, td)
            ok = True
        except NotDivisible:
            ok = False
        tally.compare(ok, True, ideal_element=e)
    for a in basis:
        tally.compare(td.thom(action(a)), op(td.thom(a)), a=a)
    for n in (2, 3):
        for a in basis:
            tally.compare(td.thom(action.power(a, n)), _power(op, td.thom(a), n),
                          a=a, power=n)
    # Additivity of the twisted action on random elements of the full span.
    rng = random.Random(seed)
    spans = [sum((a * rng.randint(-9, 9) for a in basis), td.base_ring.zero())
             for _ in range(4)]
    for x, y in itertools.combinations_with_replacement(spans, 2):
        c = rng.randint(-9, 9)
        tally.compare(action(x + y * c), action(x) + action(y) * c, x=x, y=y, c=c)
    return tally.report(rho=str(r))


_PSI = re.compile(r"^psi\^(\d+)$")


def _same_kind_on(op: Operation, ring: Ring) -> Operation:
    if op.label == "Sq":
        return total_sq(ring)
    m = _PSI.match(op.label)
    if m:
        return adams(ring, int(m.group(1)), allow_degenerate=True)
    raise ValueError(f"cannot transport operation {op.label!r}; pass target_op")


def check_composite_module_map(td: ThomData, op, g: RingMap,
                               target_op: Operation | None = None) -> VerificationReport:
    """``a -> g(a*u)`` intertwines the twisted action with ``op`` on the target.

    ``g`` must commute with the operation; otherwise ``NotCommuting`` is
    raised and no module claim is made.
    """
    op = thom_operation(td, op)
    target_op = target_op or _same_kind_on(op, g.target)
    for mono in td.ring.basis:
        m = td.ring.monomial(mono)
        lhs, rhs = target_op(g(m)), g(op(m))
        if lhs != rhs:
            raise NotCommuting(
                f"map does not commute with {op.label} at {m}: {lhs} != {rhs}",
                witness=str(m))
    base_op = base_operation(td, op)
    r = rho(td, op)
    action = TwistedAction(base_op, r)
    tally = _Tally("composite-module-map")
    for a in td.base_ring.basis_elements():
        tally.compare(g(td.thom(action(a))), target_op(g(td.thom(a))), a=a)
    return tally.report(rho=str(r))


def _compare_by_degree(tally: _Tally, lhs: Element, rhs: Element, **inputs):
    degrees = lhs.degrees() | rhs.degrees() | {0}
    for k in range(max(degrees) + 1):
        tally.compare(lhs.degree_part(k), rhs.degree_part(k), k=k, **inputs)


def check_sum_formula(space: SpaceModel, b1: BundleDescriptor, b2: BundleDescriptor,
                      op, signed: bool = True) -> VerificationReport:
    """Degree-by-degree sum formula against the division oracle."""
    kind = as_kind(op)
    td1 = build_thom_model(space, b1)
    r1 = rho(td1, thom_operation(td1, kind))
    r2 = rho_via_division(space, b2, kind)
    whole = rho_via_division(space, b1 + b2, kind)
    conv = signed_convolution(r1, td1.degree_of_u, r2, signed=signed)
    tally = _Tally("sum-formula")
    _compare_by_degree(tally, whole, conv)
    return tally.report(rho=str(whole))


def exterior_instance():
    """Two formal Thom models with odd Thom classes and odd twisting parts.

    Base ``Λ[s]``, Thom ring ``Λ[s, u]``, operation ``u -> u + s*u``, and a
    copy with ``t, v``.
    """
    base1 = make_ring("Z", [ext("s", 1)])
    ring1 = make_ring("Z", [ext("s", 1), ext("u", 1)])
    base2 = make_ring("Z", [ext("t", 1)])
    ring2 = make_ring("Z", [ext("t", 1), ext("v", 1)])
    s, u = ring1.gens()
    t, v = ring2.gens()
    op1 = make_formal_operation(ring1, {"u": u + s * u}, "alpha")
    op2 = make_formal_operation(ring2, {"v": v + t * v}, "alpha")
    return ThomData(base1, ring1, u), op1, ThomData(base2, ring2, v), op2


def line_instance(theory: str = KTHEORY, n: int = 1, op: str = "psi:2"):
    """Two copies of the single-line Thom model over ``CP(n)`` or ``RP(n)``."""
    factor = CP(n) if theory == KTHEORY else RP(n)
    space = SpaceModel((factor,), theory)
    td = build_thom_model(space, BundleDescriptor((1,)))
    o = thom_operation(td, op)
    return td, o, td, o


def check_product_formula_signed(instance=None, signed: bool = True) -> VerificationReport:
    """Signed cross-product formula against the division oracle on ``ξ × ζ``."""
    td1, op1, td2, op2 = instance or exterior_instance()
    r1, r2 = rho(td1, op1), rho(td2, op2)
    td = external_thom_product(td1, td2)
    _, ext_left, ext_right = external_product_ring(td1.ring, td2.ring)
    op = product_operation(op1, op2, td.ring, ext_left, ext_right)
    oracle = rho(td, op)
    _, left, right = external_product_ring(td1.base_ring, td2.base_ring)
    conv = signed_convolution(r1, td1.degree_of_u, r2, left, right, signed=signed)
    tally = _Tally("product-formula-signed")
    _compare_by_degree(tally, oracle, conv)
    return tally.report(rho=str(oracle), rho_left=str(r1), rho_right=str(r2),
                        degree_of_u=td1.degree_of_u)


def check_naturality(f: ModelMap, bundle: BundleDescriptor, op) -> VerificationReport:
    """``rho(f* ξ) == f* rho(ξ)``, compared coefficient by coefficient."""
    kind = as_kind(op)
    upstairs = rho_via_division(f.codomain, bundle, kind)
    downstairs = rho_via_division(f.domain, f.pull(bundle), kind)
    pulled = f.ring_map(upstairs)
    tally = _Tally("naturality")
    ring = f.domain.ring
    for mono in ring.basis:
        tally.compare(pulled.coefficient(mono), downstairs.coefficient(mono),
                      monomial=ring.render_monomial(mono) or "1")
    return tally.report(rho=str(downstairs))


def check_operation_axioms(op, seed: int = 0) -> VerificationReport:
    """Additivity and multiplicativity on all pairs of basis monomials."""
    ring = op.ring
    tally = _Tally("operation-axioms")
    rng = random.Random(seed)
    tally.compare(op(ring.one()), ring.one(), a=1)
    basis = ring.basis_elements()
    for m, n in itertools.product(basis, repeat=2):
        if ring.is_f2:
            c1 = c2 = 1
        else:
            c1, c2 = rng.randint(-9, 9), rng.randint(-9, 9)
        tally.compare(op(m * c1 + n * c2), op(m) * c1 + op(n) * c2, m=m, n=n, c1=c1, c2=c2)
        tally.compare(op(m * n), op(m) * op(n), m=m, n=n)
    return tally.report()


def check_rho_agreement(space: SpaceModel, bundle: BundleDescriptor, op) -> VerificationReport:
    """Division oracle, splitting formula and (for Sq) the Stiefel-Whitney class agree."""
    kind = as_kind(op)
    tally = _Tally("rho-agreement")
    by_division = rho_via_division(space, bundle, kind)
    by_splitting = rho_via_splitting(space, bundle, kind)
    tally.compare(by_division, by_splitting, path="splitting")
    if kind.name == "sq":
        tally.compare(by_division, total_sw(bundle, space), path="stiefel-whitney")
    return tally.report(rho=str(by_division))


def check_permutation_invariance(space: SpaceModel, bundle: BundleDescriptor,
                                 op) -> VerificationReport:
    """``rho`` does not depend on the order in which summands are listed."""
    kind = as_kind(op)
    td = build_thom_model(space, bundle)
    reference = rho(td, thom_operation(td, kind))
    tally = _Tally("permutation-invariance")
    for order in sorted(set(itertools.permutations(bundle.summands))):
        u = td.ring.one()
        for i in order:
            u = u * space.line_class(i, td.ring)
        permuted = ThomData(td.base_ring, td.ring, u)
        tally.compare(rho(permuted, thom_operation(permuted, kind)), reference,
                      order=" + ".join(f"L{i}" for i in order))
    return tally.report(rho=str(reference))


def check_uniqueness(td: ThomData, op) -> VerificationReport:
    """No nonzero base class is killed by ``u``, so ``rho`` is unique."""
    op = thom_operation(td, op)
    r = rho(td, op)
    tally = _Tally("uniqueness")
    for a in td.base_ring.basis_elements():
        # (rho + a) * u == rho * u would give a second solution.
        tally.compare(td.thom(r + a) != td.thom(r), True, perturbation=a)
    return tally.report(rho=str(r))


# -- suite ---------------------------------------------------------------


@dataclass(frozen=True)
class SuiteBounds:
    max_factors: int = 2
    max_n: int = 4
    max_summands: int = 3
    ks: tuple = (1, 2, 3, 5)
    naturality_max_n: int = 6
    max_basis_for_laws: int = 64


def suite_spaces(theory: str, max_factors: int, max_n: int):
    kind = RP if theory == MOD2 else CP
    for count in range(1, max_factors + 1):
        for ns in itertools.product(range(max_n + 1), repeat=count):
            yield SpaceModel(tuple(kind(n) for n in ns), theory)


def suite_bundles(space: SpaceModel, max_summands: int):
    idx = range(1, len(space.factors) + 1)
    for r in range(1, max_summands + 1):
        for combo in itertools.combinations_with_replacement(idx, r):
            yield BundleDescriptor(combo)


def suite_kinds(bounds: SuiteBounds):
    return ["sq"] + [f"psi:{k}" for k in bounds.ks]


def suite_configurations(bounds: SuiteBounds = SuiteBounds()):
    """All ``(space, bundle, op)`` triples inside the bounds."""
    for op in suite_kinds(bounds):
        theory = as_kind(op).theory
        for space in suite_spaces(theory, bounds.max_factors, bounds.max_n):
            for bundle in suite_bundles(space, bounds.max_summands):
                yield space, bundle, op


def _label(space, bundle=None, op=None, extra=None):
    parts = [str(space)]
    if bundle is not None:
        parts.append(str(bundle))
    if op is not None:
        parts.append(str(op))
    if extra:
        parts.append(extra)
    return " | ".join(parts)


def naturality_maps(theory: str, max_factors: int, max_n: int, min_factors: int = 1):
    """Truncation inclusions ``M < N`` and factor projections inside the bounds."""
    for space in suite_spaces(theory, max_factors, max_n):
        if len(space.factors) < min_factors:
            continue
        ranges = [range(f.n + 1) for f in space.factors]
        for ms in itertools.product(*ranges):
            if list(ms) == [f.n for f in space.factors]:
                continue
            small = SpaceModel(tuple(type(f)(f.kind, m) for f, m in zip(space.factors, ms)),
                               theory)
            yield truncation_inclusion(small, space)
        if len(space.factors) > 1:
            for r in range(1, len(space.factors)):
                for keep in itertools.permutations(range(1, len(space.factors) + 1), r):
                    yield factor_projection(space, keep)


def run_suite(bounds: SuiteBounds = SuiteBounds()) -> list:
    configs = list(suite_configurations(bounds))
    labels = [_label(*c) for c in configs]
    reports = []

    thoms = [(build_thom_model(space, bundle), op) for space, bundle, op in configs]
    tops = [(td, thom_operation(td, op)) for td, op in thoms]

    reports.append(merge_reports("eqm", (check_eqm(td, o) for td, o in tops), labels))
    reports.append(merge_reports(
        "thom-module-iso", (check_thom_module_iso(td, o) for td, o in tops), labels))

    def composite(td, o):
        g = RingMap(td.ring, td.space.ring,
                    {n: td.space.ring.gen(n) for n in td.space.ring.names})
        return check_composite_module_map(td, o, g)

    reports.append(merge_reports(
        "composite-module-map", (composite(td, o) for td, o in tops), labels))
    reports.append(merge_reports(
        "rho-agreement", (check_rho_agreement(*c) for c in configs), labels))
    reports.append(merge_reports(
        "uniqueness", (check_uniqueness(td, o) for td, o in tops), labels))

    perm = [c for c in configs if len(set(c[1].summands)) > 1]
    reports.append(merge_reports(
        "permutation-invariance", (check_permutation_invariance(*c) for c in perm),
        [_label(*c) for c in perm]))

    sums, sum_labels = [], []
    for op in suite_kinds(bounds):
        theory = as_kind(op).theory
        for space in suite_spaces(theory, bounds.max_factors, bounds.max_n):
            bundles = list(suite_bundles(space, bounds.max_summands - 1))
            for b1, b2 in itertools.product(bundles, repeat=2):
                if b1.rank + b2.rank <= bounds.max_summands:
                    sums.append(check_sum_formula(space, b1, b2, op))
                    sum_labels.append(_label(space, f"{b1} ; {b2}", op))
    reports.append(merge_reports("sum-formula", sums, sum_labels))

    products = [("exterior", exterior_instance())]
    products.append(("ktheory CP(2)", line_instance(KTHEORY, 2, "psi:3")))
    products.append(("mod2 RP(2)", line_instance(MOD2, 2, "sq")))
    reports.append(merge_reports(
        "product-formula-signed",
        (check_product_formula_signed(inst) for _, inst in products),
        [name for name, _ in products]))

    nats, nat_labels = [], []
    for op in suite_kinds(bounds):
        theory = as_kind(op).theory
        maps = itertools.chain(
            naturality_maps(theory, 1, bounds.naturality_max_n),
            naturality_maps(theory, bounds.max_factors, bounds.max_n, min_factors=2))
        for f in maps:
            for bundle in suite_bundles(f.codomain, min(bounds.max_summands, 2)):
                nats.append(check_naturality(f, bundle, op))
                nat_labels.append(_label(f"{f.domain} -> {f.codomain}", bundle, op))
    reports.append(merge_reports("naturality", nats, nat_labels))

    axioms, ax_labels = [], []
    for op in suite_kinds(bounds):
        theory = as_kind(op).theory
        for space in suite_spaces(theory, bounds.max_factors, bounds.max_n):
            if len(space.ring.basis) <= bounds.max_basis_for_laws:
                axioms.append(check_operation_axioms(as_kind(op).build(space.ring)))
                ax_labels.append(_label(space, op=op))
    reports.append(merge_reports("operation-axioms", axioms, ax_labels))
    return reports


CHECK_NAMES = (
    "eqm",
    "thom-module-iso",
    "composite-module-map",
    "sum-formula",
    "product-formula-signed",
    "naturality",
    "operation-axioms",
    "rho-agreement",
    "permutation-invariance",
    "uniqueness",
)
