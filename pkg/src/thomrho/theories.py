"""Sum- and product-preserving operations on the ring models.

An :class:`Operation` is stored only by its values on generators and is
evaluated through the multiplicative extension, so additivity and
multiplicativity hold by construction.  Coefficients pass through
unchanged, i.e. ``op(n * 1) == n * 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb
from typing import Mapping

from .errors import (
    InvalidSpec,
    ModelError,
    RingMismatch,
    TheoryMismatch,
    UnsupportedBundle,
    UnsupportedGeneratorDegree,
    UnsupportedK,
)
from .poly_kernel import F2, POLYNOMIAL, Z, Element, Ring, RingMap
from .spaces import KTHEORY, MOD2, BundleDescriptor, SpaceModel


class Operation:
    def __init__(self, ring: Ring, images: Mapping, label: str = "alpha"):
        self.ring = ring
        self.label = label
        self.map = RingMap(ring, ring, images)

    @property
    def images(self) -> dict:
        return {g.name: img for g, img in zip(self.ring.generators, self.map.images)}

    def __call__(self, a: Element) -> Element:
        if a.ring != self.ring:
            raise RingMismatch(f"{self.label} is not defined on {a.ring}")
        return self.map(a)

    def __repr__(self):
        imgs = ", ".join(f"{n} -> {v}" for n, v in self.images.items())
        return f"Operation({self.label}: {imgs})"


def apply_operation(op: Operation, a: Element) -> Element:
    return op(a)


def make_formal_operation(ring: Ring, images: Mapping, label: str = "alpha") -> Operation:
    """Operation with user-chosen generator images.

    Generators missing from ``images`` are fixed.  Raises
    ``RelationViolation`` naming the offending generator.
    """
    full = {g.name: ring.gen(g.name) for g in ring.generators}
    full.update(images)
    return Operation(ring, full, label)


def total_sq(ring: Ring) -> Operation:
    """Total Steenrod square ``g -> g + g^2`` on generators of degree 1 or 2."""
    if ring.coefficients != F2:
        raise TheoryMismatch("the total Steenrod square needs F2 coefficients")
    images = {}
    for g in ring.generators:
        if g.degree not in (1, 2):
            raise UnsupportedGeneratorDegree(
                f"Sq is only modelled on degree 1 and 2 generators, {g.name} has degree {g.degree}")
        x = ring.gen(g.name)
        images[g.name] = x + x * x
    return Operation(ring, images, "Sq")


def adams(ring: Ring, k: int, allow_degenerate: bool = False) -> Operation:
    """Adams operation on a K-theory model with generators ``x_i = eta_i - 1``.

    ``psi^k(x) = (1 + x)^k - 1``.  ``k == 0`` is accepted only with
    ``allow_degenerate`` and then kills every generator.
    """
    if k < 0 or (k == 0 and not allow_degenerate):
        raise UnsupportedK(f"Adams operation psi^{k} is not supported (need k >= 1)")
    if ring.coefficients != Z:
        raise TheoryMismatch("Adams operations need integer coefficients")
    images = {}
    for g in ring.generators:
        if g.degree != 0 or g.kind != POLYNOMIAL:
            raise UnsupportedGeneratorDegree(
                f"K-theory generator {g.name} must be a degree-0 polynomial generator")
        x = ring.gen(g.name)
        images[g.name] = sum((x ** j * comb(k, j) for j in range(1, k + 1)),
                             ring.zero())
    return Operation(ring, images, f"psi^{k}")


def product_operation(left_op: Operation, right_op: Operation, ring: Ring,
                      left: RingMap, right: RingMap, label: str | None = None) -> Operation:
    """``left_op ⊗ right_op`` on an external product ring."""
    # Product generators are the left block followed by the right block.
    lnames = ring.names[:left.source.rank]
    rnames = ring.names[left.source.rank:]
    images = {}
    for name, g in zip(lnames, left.source.gens()):
        images[name] = left(left_op(g))
    for name, g in zip(rnames, right.source.gens()):
        images[name] = right(right_op(g))
    return Operation(ring, images, label or f"{left_op.label}x{right_op.label}")


_OP_RE = re.compile(r"^\s*(?:(sq)|psi\s*:\s*(-?\d+))\s*$")


@dataclass(frozen=True)
class OpKind:
    """Stable operation identifier: ``sq`` or ``psi:k``."""

    name: str
    k: int | None = None

    @classmethod
    def parse(cls, text: str) -> "OpKind":
        m = _OP_RE.match(text)
        if not m:
            raise InvalidSpec(f"unknown operation {text!r} (expected 'sq' or 'psi:K')")
        if m.group(1):
            return cls("sq")
        return cls("psi", int(m.group(2)))

    @property
    def theory(self) -> str:
        return MOD2 if self.name == "sq" else KTHEORY

    def build(self, ring: Ring, allow_degenerate: bool = False) -> Operation:
        if self.name == "sq":
            return total_sq(ring)
        return adams(ring, self.k, allow_degenerate)

    def check(self, allow_degenerate: bool = False) -> "OpKind":
        if self.name == "psi" and (self.k < 0 or (self.k == 0 and not allow_degenerate)):
            raise UnsupportedK(f"Adams operation psi^{self.k} is not supported (need k >= 1)")
        return self

    def __str__(self):
        return "sq" if self.name == "sq" else f"psi:{self.k}"


def as_kind(op) -> OpKind:
    if isinstance(op, OpKind):
        return op
    if isinstance(op, str):
        return OpKind.parse(op)
    raise ModelError(f"not an operation identifier: {op!r}")


def total_sw(bundle: BundleDescriptor, space: SpaceModel) -> Element:
    """Total Stiefel-Whitney class ``prod (1 + a_i)`` of a sum of lines.

    A summand over a ``CP`` factor is the realification of the complex
    tautological line, whose total class is ``1 + y``.
    """
    if space.theory != MOD2:
        raise UnsupportedBundle("Stiefel-Whitney classes live in the mod-2 model")
    bundle.validate(space)
    ring = space.ring
    w = ring.one()
    for i in bundle.summands:
        w = w * (ring.one() + space.line_class(i))
    return w
