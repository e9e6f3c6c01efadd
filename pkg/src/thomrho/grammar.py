"""Parsers for the command-line expression language.

::

    space   := factor | space "x" factor
    factor  := ("CP" | "RP") "(" nat ")"
    bundle  := term ("+" term)*
    term    := [nat "*"] "L" nat
    element := polynomial in the generators of a ring, e.g. "2 + x - 3*x^2"

Whitespace is ignored everywhere; keywords are case-sensitive.
"""

from __future__ import annotations

import re
from collections import Counter
from math import comb

from .errors import ParseError
from .poly_kernel import Element, Ring, render_terms
from .spaces import KTHEORY, MOD2, BundleDescriptor, Factor, SpaceModel

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_NAT = re.compile(r"[0-9]+")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        self.skip()
        return self.text.startswith(literal, self.pos)

    def accept(self, literal: str) -> bool:
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str):
        if not self.accept(literal):
            self.fail(f"expected {literal!r}")

    def nat(self) -> int:
        self.skip()
        m = _NAT.match(self.text, self.pos)
        if not m:
            self.fail("expected a natural number")
        self.pos = m.end()
        return int(m.group())

    def name(self) -> str:
        self.skip()
        m = _NAME.match(self.text, self.pos)
        if not m:
            self.fail("expected a name")
        self.pos = m.end()
        return m.group()

    def fail(self, message: str):
        found = self.text[self.pos:self.pos + 1] or "end of input"
        raise ParseError(f"{message}, found {found!r}", self.text, self.pos)

    def finish(self):
        if not self.at_end():
            self.fail("unexpected trailing input")


def parse_factors(text: str) -> tuple:
    sc = _Scanner(text)
    factors = [_factor(sc)]
    while sc.accept("x"):
        factors.append(_factor(sc))
    sc.finish()
    return tuple(factors)


def _factor(sc: _Scanner) -> Factor:
    if sc.accept("CP"):
        kind = "CP"
    elif sc.accept("RP"):
        kind = "RP"
    else:
        sc.fail("expected 'CP' or 'RP'")
    sc.expect("(")
    n = sc.nat()
    sc.expect(")")
    return Factor(kind, n)


def parse_space(text: str, theory: str | None = None) -> SpaceModel:
    """Parse a space; without ``theory``, any RP factor selects mod 2."""
    factors = parse_factors(text)
    if theory is None:
        theory = MOD2 if any(f.kind == "RP" for f in factors) else KTHEORY
    return SpaceModel(factors, theory)


def parse_bundle(text: str, space: SpaceModel | None = None) -> BundleDescriptor:
    sc = _Scanner(text)
    summands = list(_bundle_term(sc))
    while sc.accept("+"):
        summands.extend(_bundle_term(sc))
    sc.finish()
    bundle = BundleDescriptor(tuple(summands))
    if space is not None:
        bundle.validate(space)
    return bundle


def _bundle_term(sc: _Scanner):
    mult = 1
    sc.skip()
    if _NAT.match(sc.text, sc.pos):
        start = sc.pos
        mult = sc.nat()
        if mult == 0:
            raise ParseError("multiplicity must be positive", sc.text, start)
        sc.expect("*")
    sc.expect("L")
    start = sc.pos
    index = sc.nat()
    if index == 0:
        raise ParseError("line bundles are numbered from L1", sc.text, start)
    return [index] * mult


def render_space(space: SpaceModel) -> str:
    return str(space)


def render_bundle(bundle: BundleDescriptor) -> str:
    return str(bundle)


# -- elements -------------------------------------------------------------

_ETA = re.compile(r"^eta([0-9]*)$")


def parse_element(text: str, ring: Ring) -> Element:
    """Parse a polynomial in the generators of ``ring``.

    In K-theory rings ``eta`` (or ``eta2`` ...) stands for ``1 + x``
    (``1 + x2`` ...).
    """
    sc = _Scanner(text)
    value = _expr(sc, ring)
    sc.finish()
    return value


def _expr(sc, ring):
    negate = sc.accept("-")
    value = _term(sc, ring)
    if negate:
        value = -value
    while True:
        if sc.accept("+"):
            value = value + _term(sc, ring)
        elif sc.accept("-"):
            value = value - _term(sc, ring)
        else:
            return value


def _term(sc, ring):
    value = _power(sc, ring)
    while True:
        if sc.accept("*"):
            value = value * _power(sc, ring)
        elif _starts_atom(sc):
            value = value * _power(sc, ring)
        else:
            return value


def _starts_atom(sc) -> bool:
    sc.skip()
    if sc.pos >= len(sc.text):
        return False
    ch = sc.text[sc.pos]
    return ch == "(" or ch.isalpha() or ch == "_"


def _power(sc, ring):
    base = _atom(sc, ring)
    if sc.accept("^"):
        return base ** sc.nat()
    return base


def _atom(sc, ring):
    sc.skip()
    if sc.accept("("):
        value = _expr(sc, ring)
        sc.expect(")")
        return value
    if sc.pos < len(sc.text) and sc.text[sc.pos].isdigit():
        return ring.scalar(sc.nat())
    start = sc.pos
    name = sc.name()
    if name in ring.names:
        return ring.gen(name)
    m = _ETA.match(name)
    if m:
        xname = "x" + m.group(1)
        if xname in ring.names:
            return ring.one() + ring.gen(xname)
    raise ParseError(f"unknown generator {name!r}", sc.text, start)


# -- eta rendering ----------------------------------------------------------


def eta_terms(element: Element) -> dict:
    """Coefficients in powers of ``eta_i = 1 + x_i`` (substitute ``x = eta - 1``)."""
    out = Counter()
    for mono, c in element.terms.items():
        partial = {(): c}
        for e in mono:
            # (eta - 1)^e = sum_j C(e, j) eta^j (-1)^(e-j)
            expansion = _binomial_shift(e)
            nxt = Counter()
            for prefix, pc in partial.items():
                for j, bc in expansion:
                    nxt[prefix + (j,)] += pc * bc
            partial = nxt
        for mono_eta, v in partial.items():
            out[mono_eta] += v
    return {m: c for m, c in out.items() if c}


def _binomial_shift(e: int):
    return [(j, comb(e, j) * (-1) ** (e - j)) for j in range(e + 1)]


def render_eta(element: Element) -> str:
    ring = element.ring
    names = ["eta" + n[1:] for n in ring.names]
    terms = eta_terms(element)
    items = sorted(terms.items(), key=lambda t: (sum(t[0]), tuple(-e for e in t[0])))
    return render_terms(items, names)
