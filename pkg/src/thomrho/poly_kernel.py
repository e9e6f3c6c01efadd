"""Exact arithmetic in truncated graded-commutative rings.

A ring is presented by an ordered list of generators, each either a
truncated polynomial generator (``g**(T+1) == 0``) or an exterior
generator (``g**2 == 0``).  Coefficients are arbitrary integers or F2.
Elements are stored as ``{exponent tuple: coefficient}`` maps in the
generator order of the ring; products are normal-ordered with the
Koszul sign of every transposition of odd-degree generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from operator import add as _add, mul as _mul
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    CoefficientMismatch,
    InvalidSpec,
    RelationViolation,
    RingMismatch,
)

Z = "Z"
F2 = "F2"
POLYNOMIAL = "polynomial"
EXTERIOR = "exterior"

DEFAULT_MAX_BASIS = 4096

Monomial = tuple


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    kind: str = POLYNOMIAL
    truncation: int = 1

    @property
    def bound(self) -> int:
        """Largest exponent that survives the relation."""
        return 1 if self.kind == EXTERIOR else self.truncation


def poly(name: str, degree: int, truncation: int) -> Generator:
    return Generator(name, degree, POLYNOMIAL, truncation)


def ext(name: str, degree: int) -> Generator:
    return Generator(name, degree, EXTERIOR, 1)


@dataclass(frozen=True)
class Ring:
    coefficients: str
    generators: tuple
    max_basis: int = field(default=DEFAULT_MAX_BASIS, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        _validate(self)
        gens = self.generators
        f2 = self.coefficients == F2
        setattr_ = object.__setattr__
        setattr_(self, "is_f2", f2)
        setattr_(self, "rank", len(gens))
        setattr_(self, "_bounds", tuple(g.bound for g in gens))
        setattr_(self, "_degrees", tuple(g.degree for g in gens))
        # Signs are invisible in characteristic 2.
        odd = tuple(not f2 and g.degree % 2 == 1 for g in gens)
        setattr_(self, "_odd", odd)
        setattr_(self, "_has_odd", any(odd))
        setattr_(self, "_index", {g.name: i for i, g in enumerate(gens)})
        # memo of monomial products, filled lazily
        setattr_(self, "_products", {})

    # -- structure --------------------------------------------------------

    @property
    def names(self) -> tuple:
        return tuple(g.name for g in self.generators)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InvalidSpec(f"no generator named {name!r}") from None

    def generator(self, name: str) -> Generator:
        return self.generators[self.index(name)]

    def degree(self, mono: Monomial) -> int:
        return sum(map(_mul, mono, self._degrees))

    def in_bounds(self, mono: Monomial) -> bool:
        for e, b in zip(mono, self._bounds):
            if e < 0 or e > b:
                return False
        return True

    @cached_property
    def basis(self) -> tuple:
        """All monomials within the truncation window, in display order."""
        monos = itertools.product(*(range(b + 1) for b in self._bounds))
        return tuple(sorted(monos, key=self.sort_key))

    def sort_key(self, mono: Monomial):
        return (self.degree(mono), sum(mono), tuple(-e for e in mono))

    @property
    def unit(self) -> Monomial:
        return (0,) * self.rank

    # -- arithmetic on monomials -------------------------------------------

    def mono_mul(self, m: Monomial, n: Monomial):
        """Return ``(sign, m*n)`` or ``None`` when the product vanishes."""
        key = (m, n)
        try:
            return self._products[key]
        except KeyError:
            pass
        result = self._products[key] = self._mono_mul(m, n)
        return result

    def _mono_mul(self, m: Monomial, n: Monomial):
        out = tuple(map(_add, m, n))
        for e, bound in zip(out, self._bounds):
            if e > bound:
                return None
        if not self._has_odd:
            return 1, out
        # n's generators move left past m's later odd generators.
        odd = self._odd
        odd_after = 0
        swaps = 0
        for j in range(self.rank - 1, -1, -1):
            if odd[j]:
                swaps += n[j] * odd_after
                odd_after += m[j]
        return (-1 if swaps % 2 else 1), out

    def normalize(self, c: int) -> int:
        return c % 2 if self.is_f2 else c

    # -- element constructors ----------------------------------------------

    def element(self, terms: Mapping | Iterable = ()) -> "Element":
        return Element(self, terms)

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return self.scalar(1)

    def scalar(self, c: int) -> "Element":
        return Element(self, {self.unit: c})

    def monomial(self, mono: Monomial, coeff: int = 1) -> "Element":
        return Element(self, {tuple(mono): coeff})

    def gen(self, name: str) -> "Element":
        i = self.index(name)
        mono = tuple(1 if j == i else 0 for j in range(self.rank))
        return Element(self, {mono: 1})

    def gens(self) -> tuple:
        return tuple(self.gen(n) for n in self.names)

    def basis_elements(self) -> tuple:
        return tuple(self.monomial(m) for m in self.basis)

    def render_monomial(self, mono: Monomial) -> str:
        return render_monomial(mono, self.names)

    def __str__(self):
        coeff = "Z" if self.coefficients == Z else "F2"
        parts = []
        for g in self.generators:
            if g.kind == EXTERIOR:
                parts.append(f"{g.name}:{g.degree} ext")
            else:
                parts.append(f"{g.name}:{g.degree}^{g.truncation}")
        return f"{coeff}[{', '.join(parts)}]"


def _validate(ring: Ring) -> None:
    if ring.coefficients not in (Z, F2):
        raise InvalidSpec(f"unsupported coefficients {ring.coefficients!r}")
    seen = set()
    for g in ring.generators:
        if not isinstance(g, Generator):
            raise InvalidSpec(f"not a generator: {g!r}")
        if not g.name or g.name in seen:
            raise InvalidSpec(f"duplicate or empty generator name {g.name!r}")
        seen.add(g.name)
        if g.degree < 0:
            raise InvalidSpec(f"negative degree for {g.name}")
        if g.kind == EXTERIOR:
            if g.degree % 2 == 0 and ring.coefficients != F2:
                raise InvalidSpec(
                    f"exterior generator {g.name} must have odd degree over Z")
        elif g.kind == POLYNOMIAL:
            if g.truncation < 1:
                raise InvalidSpec(f"truncation of {g.name} must be >= 1")
            if g.degree % 2 == 1 and ring.coefficients != F2:
                raise InvalidSpec(
                    f"odd-degree polynomial generator {g.name} over Z")
        else:
            raise InvalidSpec(f"unknown generator kind {g.kind!r}")
    size = 1
    for g in ring.generators:
        size *= g.bound + 1
    if size > ring.max_basis:
        raise InvalidSpec(
            f"basis of {size} monomials exceeds cap {ring.max_basis}")


def make_ring(coefficients: str, generators: Iterable[Generator],
              max_basis: int = DEFAULT_MAX_BASIS) -> Ring:
    return Ring(coefficients, tuple(generators), max_basis)


def render_monomial(mono: Monomial, names) -> str:
    factors = []
    for e, name in zip(mono, names):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return "*".join(factors)


def render_terms(items, names) -> str:
    """Render ``(monomial, coeff)`` pairs already in display order."""
    out = []
    for mono, c in items:
        body = render_monomial(mono, names)
        mag = abs(c)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        if not out:
            out.append(text if c > 0 else f"-{text}")
        else:
            out.append(f" + {text}" if c > 0 else f" - {text}")
    return "".join(out) if out else "0"


def _drop_zeros(ring: Ring, acc: dict) -> dict:
    if ring.is_f2:
        return {m: 1 for m, c in acc.items() if c % 2}
    return {m: c for m, c in acc.items() if c}


class Element:
    """An element of a :class:`Ring` in canonical form."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping | Iterable = (), *,
                 _clean: bool = False):
        self.ring = ring
        if _clean:
            self._terms = terms
        else:
            items = terms.items() if isinstance(terms, dict) else (
                terms.items() if hasattr(terms, "items") else terms)
            acc = {}
            for mono, c in items:
                mono = tuple(mono)
                if len(mono) != ring.rank:
                    raise InvalidSpec(
                        f"monomial {mono} does not match ring rank {ring.rank}")
                # Monomials outside the window vanish by the relations.
                if not ring.in_bounds(mono):
                    if any(e < 0 for e in mono):
                        raise InvalidSpec(f"negative exponent in {mono}")
                    continue
                acc[mono] = acc.get(mono, 0) + int(c)
            if ring.is_f2:
                self._terms = {m: 1 for m, c in acc.items() if c % 2}
            else:
                self._terms = {m: c for m, c in acc.items() if c}
        self._hash = None

    # -- views ---------------------------------------------------------

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def coefficient(self, mono: Monomial) -> int:
        return self._terms.get(tuple(mono), 0)

    def items(self):
        """Terms in display order."""
        return sorted(self._terms.items(), key=lambda t: self.ring.sort_key(t[0]))

    def degrees(self) -> set:
        return {self.ring.degree(m) for m in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_degree(self) -> int | None:
        degs = self.degrees()
        if len(degs) != 1:
            return None
        return next(iter(degs))

    def degree_part(self, k: int) -> "Element":
        deg = self.ring.degree
        return Element(self.ring, {m: c for m, c in self._terms.items()
                                   if deg(m) == k}, _clean=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.ring is not self.ring and other.ring != self.ring:
                raise RingMismatch(
                    f"elements live in different rings: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return self.ring.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        norm = self.ring.normalize
        for m, c in other._terms.items():
            s = norm(acc.get(m, 0) + c)
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return Element(self.ring, acc, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        norm = self.ring.normalize
        return Element(self.ring, {m: norm(-c) for m, c in self._terms.items()},
                       _clean=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            scaled = {m: c * other for m, c in self._terms.items()}
            return Element(self.ring, _drop_zeros(self.ring, scaled), _clean=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        products = ring._products
        mono_mul = ring.mono_mul
        acc = {}
        get = acc.get
        for m, a in self._terms.items():
            for n, b in other._terms.items():
                prod = products.get((m, n), False)
                if prod is False:
                    prod = mono_mul(m, n)
                if prod is None:
                    continue
                sign, mn = prod
                acc[mn] = get(mn, 0) + sign * a * b
        return Element(ring, _drop_zeros(ring, acc), _clean=True)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not defined")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison ------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return (self.ring is other.ring or self.ring == other.ring) \
            and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return render_terms(self.items(), self.ring.names)

    def __repr__(self):
        return f"Element({self})"


def add(a: Element, b: Element) -> Element:
    return a + b


def mul(a: Element, b: Element) -> Element:
    return a * b


def degree_part(a: Element, k: int) -> Element:
    return a.degree_part(k)


class RingMap:
    """The unique sum- and product-preserving map with given generator images.

    Construction checks that each image satisfies its generator's relation;
    application never fails afterwards.
    """

    def __init__(self, source: Ring, target: Ring, images: Mapping):
        if source.coefficients != target.coefficients:
            raise CoefficientMismatch(
                f"{source.coefficients} ring mapped into {target.coefficients} ring")
        unknown = set(images) - set(source.names)
        if unknown:
            raise InvalidSpec(f"images given for unknown generators {sorted(unknown)}")
        self.source = source
        self.target = target
        imgs = []
        for g in source.generators:
            img = images.get(g.name, target.zero())
            if isinstance(img, int):
                img = target.scalar(img)
            if img.ring != target:
                raise RingMismatch(f"image of {g.name} is not in the target ring")
            imgs.append(img)
        self.images = tuple(imgs)
        self._powers = []
        for g, img in zip(source.generators, self.images):
            pows = [target.one()]
            for _ in range(g.bound + 1):
                pows.append(pows[-1] * img)
            if pows[-1]:
                raise RelationViolation(
                    f"image of {g.name} violates its relation: "
                    f"({img})^{g.bound + 1} = {pows[-1]}", generator=g.name)
            self._powers.append(tuple(pows[:-1]))
        self._memo = {}

    def image(self, name: str) -> Element:
        return self.images[self.source.index(name)]

    def apply_monomial(self, mono: Monomial) -> Element:
        # Memoized; the map itself never changes.
        hit = self._memo.get(mono)
        if hit is not None:
            return hit
        result = self.target.one()
        for pows, e in zip(self._powers, mono):
            if e:
                result = result * pows[e]
        self._memo[mono] = result
        return result

    def __call__(self, a: Element) -> Element:
        if a.ring is not self.source and a.ring != self.source:
            raise RingMismatch("element is not in the source ring of the map")
        acc = {}
        get = acc.get
        for mono, c in a._terms.items():
            for m, v in self.apply_monomial(mono)._terms.items():
                acc[m] = get(m, 0) + v * c
        return Element(self.target, _drop_zeros(self.target, acc), _clean=True)

    def compose(self, inner: "RingMap") -> "RingMap":
        """``self ∘ inner``."""
        if inner.target != self.source:
            raise RingMismatch("maps are not composable")
        return RingMap(inner.source, self.target,
                       {g.name: self(img) for g, img in
                        zip(inner.source.generators, inner.images)})

    def __repr__(self):
        imgs = ", ".join(f"{g.name} -> {img}" for g, img in
                         zip(self.source.generators, self.images))
        return f"RingMap({imgs})"


def apply_ring_map(f: RingMap, a: Element) -> Element:
    return f(a)


def identity_map(ring: Ring) -> RingMap:
    return RingMap(ring, ring, {g.name: ring.gen(g.name) for g in ring.generators})


def restriction_map(source: Ring, target: Ring) -> RingMap:
    """Send each generator to the same-named generator of ``target``, or 0."""
    images = {}
    for g in source.generators:
        if g.name in target.names:
            images[g.name] = target.gen(g.name)
    return RingMap(source, target, images)


def _product_names(left: Ring, right: Ring):
    clash = set(left.names) & set(right.names)
    lnames = [f"{n}1" if n in clash else n for n in left.names]
    rnames = [f"{n}2" if n in clash else n for n in right.names]
    if len(set(lnames) | set(rnames)) != len(lnames) + len(rnames):
        raise InvalidSpec("cannot disambiguate generator names of the product")
    return lnames, rnames


def external_product_ring(left: Ring, right: Ring):
    """Tensor product ring with its two embeddings.

    The cross product ``a × b`` is ``left_map(a) * right_map(b)``.
    Names shared by both factors get suffixes ``1`` and ``2``.
    """
    if left.coefficients != right.coefficients:
        raise CoefficientMismatch("external product of rings over different coefficients")
    lnames, rnames = _product_names(left, right)
    gens = [Generator(n, g.degree, g.kind, g.truncation)
            for n, g in zip(lnames, left.generators)]
    gens += [Generator(n, g.degree, g.kind, g.truncation)
             for n, g in zip(rnames, right.generators)]
    product = Ring(left.coefficients, tuple(gens),
                   max(left.max_basis, right.max_basis))
    lmap = RingMap(left, product,
                   {g.name: product.gen(n) for g, n in zip(left.generators, lnames)})
    rmap = RingMap(right, product,
                   {g.name: product.gen(n) for g, n in zip(right.generators, rnames)})
    return product, lmap, rmap


def cross(a: Element, b: Element, left: RingMap, right: RingMap) -> Element:
    return left(a) * right(b)
