"""Finite models of products of projective spaces and line-bundle sums.

``RP(N)`` contributes a degree-1 generator truncated at ``N`` to the mod-2
cohomology model.  ``CP(N)`` contributes a degree-2 generator in mod-2
cohomology, or the degree-0 class ``x = eta - 1`` in K-theory, truncated
at ``N``.  A factor with ``N == 0`` is a point and contributes no generator.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from string import ascii_lowercase

from .errors import InvalidSpec, TheoryMismatch, UnknownFactor
from .poly_kernel import F2, Z, Generator, Ring, RingMap

MOD2 = "mod2"
KTHEORY = "ktheory"
THEORIES = (MOD2, KTHEORY)


@dataclass(frozen=True)
class Factor:
    kind: str  # "RP" or "CP"
    n: int

    def __post_init__(self):
        if self.kind not in ("RP", "CP"):
            raise InvalidSpec(f"unknown factor kind {self.kind!r}")
        if self.n < 0:
            raise InvalidSpec("projective space dimension must be >= 0")

    def __str__(self):
        return f"{self.kind}({self.n})"


def RP(n: int) -> Factor:
    return Factor("RP", n)


def CP(n: int) -> Factor:
    return Factor("CP", n)


@dataclass(frozen=True)
class SpaceModel:
    factors: tuple
    theory: str

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.theory not in THEORIES:
            raise InvalidSpec(f"unknown theory {self.theory!r}")
        if not self.factors:
            raise InvalidSpec("a space model needs at least one factor")
        if self.theory == KTHEORY:
            for f in self.factors:
                if f.kind != "CP":
                    raise TheoryMismatch(
                        f"{f} is not supported in K-theory models (CP factors only)")

    def __str__(self):
        return " x ".join(str(f) for f in self.factors)

    @property
    def coefficients(self) -> str:
        return F2 if self.theory == MOD2 else Z

    def generator_name(self, i: int) -> str:
        """Name of the generator carried by factor ``i`` (0-based)."""
        if self.theory == MOD2:
            return ascii_lowercase[i]
        return "x" if len(self.factors) == 1 else f"x{i + 1}"

    def generator_degree(self, i: int) -> int:
        if self.theory == KTHEORY:
            return 0
        return 1 if self.factors[i].kind == "RP" else 2

    def _generators(self, extra: Counter | None = None):
        gens = []
        for i, f in enumerate(self.factors):
            t = f.n + (extra[i] if extra else 0)
            if t > 0:
                gens.append(Generator(self.generator_name(i),
                                      self.generator_degree(i), "polynomial", t))
        return gens

    @cached_property
    def ring(self) -> Ring:
        return Ring(self.coefficients, tuple(self._generators()))

    def extended_ring(self, bundle: "BundleDescriptor") -> Ring:
        """Ring of the Thom space model: truncations raised by multiplicity."""
        bundle.validate(self)
        mult = Counter(i - 1 for i in bundle.summands)
        return Ring(self.coefficients, tuple(self._generators(mult)))

    def line_class(self, i: int, ring: Ring | None = None):
        """Generator of factor ``i`` (1-based) in ``ring``, or 0 for a point."""
        ring = ring or self.ring
        name = self.generator_name(i - 1)
        if name in ring.names:
            return ring.gen(name)
        return ring.zero()


@dataclass(frozen=True)
class BundleDescriptor:
    """A sum of tautological line bundles ``L(i)`` pulled back from factors."""

    summands: tuple

    def __post_init__(self):
        s = tuple(sorted(int(i) for i in self.summands))
        if not s:
            raise InvalidSpec("a bundle needs at least one summand")
        if s[0] < 1:
            raise UnknownFactor(f"factor index L{s[0]} (factors are numbered from 1)")
        object.__setattr__(self, "summands", s)

    def validate(self, space: SpaceModel) -> "BundleDescriptor":
        for i in self.summands:
            if i > len(space.factors):
                raise UnknownFactor(
                    f"L{i} refers to factor {i} but {space} has "
                    f"{len(space.factors)} factor(s)")
        return self

    @property
    def rank(self) -> int:
        return len(self.summands)

    def multiplicities(self) -> Counter:
        return Counter(self.summands)

    def __add__(self, other: "BundleDescriptor") -> "BundleDescriptor":
        return BundleDescriptor(self.summands + other.summands)

    def __str__(self):
        parts = []
        for i, m in sorted(self.multiplicities().items()):
            parts.append(f"L{i}" if m == 1 else f"{m}*L{i}")
        return " + ".join(parts)


def line(*indices: int) -> BundleDescriptor:
    return BundleDescriptor(indices)


@dataclass(frozen=True)
class ModelMap:
    """A map of spaces ``f: domain -> codomain`` with its induced ring map
    ``f*: ring(codomain) -> ring(domain)`` and bundle pullback."""

    domain: SpaceModel
    codomain: SpaceModel
    ring_map: RingMap
    pull_index: tuple  # L(j) over codomain pulls back to L(pull_index[j-1])

    def pull(self, bundle: BundleDescriptor) -> BundleDescriptor:
        bundle.validate(self.codomain)
        return BundleDescriptor(tuple(self.pull_index[i - 1] for i in bundle.summands))


def truncation_inclusion(small: SpaceModel, big: SpaceModel) -> ModelMap:
    """Factorwise inclusion ``RP(M) ⊂ RP(N)`` / ``CP(M) ⊂ CP(N)``, ``M <= N``."""
    if small.theory != big.theory:
        raise TheoryMismatch("inclusion between different theories")
    if len(small.factors) != len(big.factors):
        raise InvalidSpec("inclusion needs the same number of factors")
    images = {}
    for i, (f, g) in enumerate(zip(small.factors, big.factors)):
        if f.kind != g.kind or f.n > g.n:
            raise InvalidSpec(f"{f} is not included in {g}")
        name = big.generator_name(i)
        if name in big.ring.names and name in small.ring.names:
            images[name] = small.ring.gen(name)
    ring_map = RingMap(big.ring, small.ring, images)
    return ModelMap(small, big, ring_map, tuple(range(1, len(big.factors) + 1)))


def factor_projection(space: SpaceModel, keep) -> ModelMap:
    """Projection of ``space`` onto the factors listed in ``keep`` (1-based)."""
    keep = tuple(keep)
    if not keep or any(not 1 <= i <= len(space.factors) for i in keep):
        raise UnknownFactor(f"projection onto {keep} is not defined for {space}")
    if len(set(keep)) != len(keep):
        raise InvalidSpec("projection factors must be distinct")
    target = SpaceModel(tuple(space.factors[i - 1] for i in keep), space.theory)
    images = {}
    for j, i in enumerate(keep):
        name = target.generator_name(j)
        if name in target.ring.names:
            images[name] = space.line_class(i)
    ring_map = RingMap(target.ring, space.ring, images)
    return ModelMap(space, target, ring_map, keep)
