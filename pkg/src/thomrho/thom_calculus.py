"""Thom-space models and the twisting class of an operation.

For a sum of tautological lines over a product of projective spaces the
Thom space is modelled by raising the truncation of each factor by the
number of summands it carries; the Thom class is the product of one
generator per summand.  The reduced cohomology of the Thom space is then
the ideal ``u * base``, and ``rho`` is read off from ``op(u) = rho * u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import (
    InvalidSpec,
    NotCommuting,
    NotDivisible,
    RingMismatch,
    TheoryMismatch,
    UnsupportedBundle,
    UnsupportedK,
)
from .poly_kernel import Element, Ring, RingMap, external_product_ring
from .spaces import KTHEORY, BundleDescriptor, SpaceModel
from .theories import Operation, OpKind, as_kind, make_formal_operation


@dataclass(frozen=True, eq=False)
class ThomData:
    """Base ring, Thom-space ring and Thom class ``u``.

    Base generators are identified with the same-named generators of the
    extended ring; extended generators without a base counterpart (a point
    factor, or the formal Thom generator) restrict to zero.  The base
    embeds linearly by copying exponents, which is well defined because
    every base relation multiplied by ``u`` vanishes.
    """

    base_ring: Ring
    ring: Ring
    u: Element
    space: SpaceModel | None = None
    bundle: BundleDescriptor | None = None

    def __post_init__(self):
        if self.base_ring.coefficients != self.ring.coefficients:
            raise TheoryMismatch("base and Thom rings use different coefficients")
        if self.u.ring != self.ring:
            raise RingMismatch("Thom class is not in the Thom ring")
        idx = []
        for g in self.base_ring.generators:
            if g.name not in self.ring.names:
                raise InvalidSpec(f"base generator {g.name} missing from the Thom ring")
            h = self.ring.generator(g.name)
            if (h.degree, h.kind) != (g.degree, g.kind) or h.bound < g.bound:
                raise InvalidSpec(f"generator {g.name} does not extend to the Thom ring")
            idx.append(self.ring.index(g.name))
        object.__setattr__(self, "_lift_index", tuple(idx))
        items = self.u.items()
        if len(items) != 1 or abs(items[0][1]) != 1:
            raise UnsupportedBundle(
                f"Thom class must be a single monomial with unit coefficient, got {self.u}")
        object.__setattr__(self, "_u_mono", items[0][0])
        object.__setattr__(self, "_u_coeff", items[0][1])

    @property
    def degree_of_u(self) -> int:
        return self.ring.degree(self._u_mono)

    def lift_monomial(self, mono):
        out = [0] * self.ring.rank
        for i, e in zip(self._lift_index, mono):
            out[i] = e
        return tuple(out)

    def lift(self, a: Element) -> Element:
        if a.ring != self.base_ring:
            raise RingMismatch("element is not in the base ring")
        return self.ring.element({self.lift_monomial(m): c for m, c in a.terms.items()})

    def thom(self, a: Element) -> Element:
        """The Thom isomorphism ``a -> a * u``."""
        return self.lift(a) * self.u

    def projection(self) -> RingMap:
        """Ring map from the Thom ring onto the base ring."""
        images = {g.name: self.base_ring.gen(g.name) for g in self.base_ring.generators}
        return RingMap(self.ring, self.base_ring, images)

    def base_monomial(self, mono):
        """Inverse of :meth:`lift_monomial`, or ``None`` outside the base window."""
        base = [0] * self.base_ring.rank
        covered = set(self._lift_index)
        for i, e in enumerate(mono):
            if e and i not in covered:
                return None
        for j, i in enumerate(self._lift_index):
            base[j] = mono[i]
        base = tuple(base)
        return base if self.base_ring.in_bounds(base) else None

    def __str__(self):
        return f"Thom ring {self.ring}, u = {self.u} (degree {self.degree_of_u})"


def build_thom_model(space: SpaceModel, bundle: BundleDescriptor) -> ThomData:
    bundle.validate(space)
    ring = space.extended_ring(bundle)
    u = ring.one()
    for i in bundle.summands:
        u = u * space.line_class(i, ring)
    return ThomData(space.ring, ring, u, space, bundle)


def divide_by_thom_class(e: Element, td: ThomData) -> Element:
    """The unique base class ``q`` with ``q * u == e``."""
    if e.ring != td.ring:
        raise RingMismatch("element is not in the Thom ring")
    mu, cu = td._u_mono, td._u_coeff
    quotient = {}
    for mono, c in e.terms.items():
        rest = tuple(a - b for a, b in zip(mono, mu))
        if any(r < 0 for r in rest):
            raise NotDivisible(
                f"term {td.ring.render_monomial(mono) or 1} of {e} has no factor {td.u}")
        base = td.base_monomial(rest)
        if base is None:
            raise NotDivisible(
                f"quotient of term {td.ring.render_monomial(mono)} by {td.u} "
                "leaves the base truncation window")
        sign, _ = td.ring.mono_mul(rest, mu)
        quotient[base] = c * sign * cu
    q = td.base_ring.element(quotient)
    if td.thom(q) != e:
        raise NotDivisible(f"{e} is not a multiple of {td.u}")
    return q


@lru_cache(maxsize=4096)
def base_operation(td: ThomData, op: Operation) -> Operation:
    """Restrict an operation on the Thom ring to the base ring.

    Raises ``NotCommuting`` if the operation does not preserve the kernel
    of the projection onto the base.
    """
    if op.ring != td.ring:
        raise RingMismatch(f"{op.label} is not defined on the Thom ring")
    proj = td.projection()
    images = {g.name: proj(op(td.ring.gen(g.name))) for g in td.base_ring.generators}
    base_op = make_formal_operation(td.base_ring, images, op.label)
    for mono in td.ring.basis:
        m = td.ring.monomial(mono)
        if proj(op(m)) != base_op(proj(m)):
            raise NotCommuting(f"{op.label} does not descend to the base ring",
                               witness=str(m))
    return base_op


def rho(td: ThomData, op: Operation) -> Element:
    """``rho`` with ``op(u) = rho * u``."""
    if op.ring != td.ring:
        raise RingMismatch(f"{op.label} is not defined on the Thom ring")
    return divide_by_thom_class(op(td.u), td)


def thom_operation(td: ThomData, op, allow_degenerate: bool = False) -> Operation:
    if isinstance(op, Operation):
        return op
    return as_kind(op).build(td.ring, allow_degenerate)


def rho_via_division(space: SpaceModel, bundle: BundleDescriptor, op,
                     allow_degenerate: bool = False) -> Element:
    """``rho`` by dividing ``op(u)`` by ``u`` in the Thom-space model.

    ``op`` is an Operation on the extended ring or an ``sq``/``psi:k`` kind.
    """
    td = build_thom_model(space, bundle)
    return rho(td, thom_operation(td, op, allow_degenerate))


def rho_line_closed_form(k: int, line, space: SpaceModel,
                         allow_degenerate: bool = False) -> Element:
    """``1 + eta + ... + eta^(k-1)`` for the line ``L(line)``, in ``x = eta - 1``."""
    if space.theory != KTHEORY:
        raise TheoryMismatch("the closed form applies to K-theory models")
    if k < 0 or (k == 0 and not allow_degenerate):
        raise UnsupportedK(f"psi^{k} is not supported (need k >= 1)")
    if isinstance(line, BundleDescriptor):
        if line.rank != 1:
            raise UnsupportedBundle("closed form takes a single line")
        line = line.summands[0]
    BundleDescriptor((line,)).validate(space)
    ring = space.ring
    eta = ring.one() + space.line_class(line)
    total = ring.zero()
    power = ring.one()
    for _ in range(k):
        total = total + power
        power = power * eta
    return total


def signed_convolution(rho1: Element, deg_u1: int, rho2: Element,
                       left: RingMap | None = None, right: RingMap | None = None,
                       signed: bool = True) -> Element:
    """``sum_k sum_{i+j=k} (-1)^(j*deg_u1) [rho1]_i [rho2]_j``.

    With ``left``/``right`` embeddings the products are cross products.
    """
    if left is not None:
        rho1 = left(rho1)
    if right is not None:
        rho2 = right(rho2)
    total = rho1.ring.zero()
    for i in sorted(rho1.degrees()):
        p = rho1.degree_part(i)
        for j in sorted(rho2.degrees()):
            term = p * rho2.degree_part(j)
            if signed and (j * deg_u1) % 2:
                term = -term
            total = total + term
    return total


def _line_rho(space: SpaceModel, i: int, kind: OpKind, allow_degenerate: bool) -> Element:
    if kind.name == "sq":
        return space.ring.one() + space.line_class(i)
    return rho_line_closed_form(kind.k, i, space, allow_degenerate)


def rho_via_splitting(space: SpaceModel, bundle: BundleDescriptor, op,
                      allow_degenerate: bool = False) -> Element:
    """``rho`` from per-line classes combined by the signed sum formula."""
    kind = as_kind(op)
    if kind.theory != space.theory:
        raise TheoryMismatch(f"{kind} does not act on the {space.theory} model of {space}")
    bundle.validate(space)
    acc = None
    acc_deg = 0
    for i in bundle.summands:
        r = _line_rho(space, i, kind, allow_degenerate)
        if acc is None:
            acc = r
        else:
            acc = signed_convolution(acc, acc_deg, r)
        acc_deg += space.generator_degree(i - 1)
    return acc


def external_thom_product(td1: ThomData, td2: ThomData) -> ThomData:
    """Thom data of the external product bundle, with ``u = u1 × u2``."""
    if td1.ring.coefficients != td2.ring.coefficients:
        raise TheoryMismatch("external product of Thom data from different theories")
    base, _, _ = external_product_ring(td1.base_ring, td2.base_ring)
    ring, left, right = external_product_ring(td1.ring, td2.ring)
    return ThomData(base, ring, left(td1.u) * right(td2.u))
