import itertools

import pytest

from oracles import adams_image, dense_pow
from thomrho.errors import RelationViolation, TheoryMismatch, UnsupportedGeneratorDegree, UnsupportedK
from thomrho.poly_kernel import F2, Z, ext, make_ring, poly, restriction_map
from thomrho.spaces import CP, MOD2, RP, SpaceModel, line
from thomrho.theories import (
    OpKind,
    adams,
    apply_operation,
    make_formal_operation,
    total_sq,
    total_sw,
)


def kring(n):
    return make_ring(Z, [poly("x", 0, n)])


def as_dense(e, n):
    return [e.coefficient((j,)) for j in range(n + 1)]


# -- total_sq ------------------------------------------------------------------


def test_sq_on_rp2():
    ring = make_ring(F2, [poly("a", 1, 2)])
    sq = total_sq(ring)
    a = ring.gen("a")
    assert str(sq(a)) == "a + a^2"
    # (a + a^2)^2 = a^2 + a^4 over F2, and a^4 = 0.
    assert str(sq(a * a)) == "a^2"
    assert str(sq(1 + a)) == "1 + a + a^2"


def test_sq_on_cp2():
    ring = make_ring(F2, [poly("y", 2, 2)])
    assert str(total_sq(ring)(ring.gen("y"))) == "y + y^2"


def test_sq_rejects_other_degrees():
    with pytest.raises(UnsupportedGeneratorDegree):
        total_sq(make_ring(F2, [poly("z", 3, 2)]))
    with pytest.raises(TheoryMismatch):
        total_sq(kring(2))


def test_sq_cartan_on_product():
    ring = make_ring(F2, [poly("a", 1, 3), poly("b", 1, 3)])
    sq = total_sq(ring)
    a, b = ring.gens()
    assert sq(a * b) == (a + a * a) * (b + b * b)


@pytest.mark.parametrize("ring", [
    make_ring(F2, [poly("a", 1, 4)]),
    make_ring(F2, [poly("a", 1, 3), poly("y", 2, 2)]),
], ids=str)
def test_sq_degree_filtration(ring):
    sq = total_sq(ring)
    for m in ring.basis:
        z = ring.monomial(m)
        n = ring.degree(m)
        image = sq(z)
        assert image.degree_part(n) == z
        assert image.degree_part(2 * n) == (z * z if n else z)
        for j in image.degrees():
            assert n <= j <= 2 * n


# -- adams --------------------------------------------------------------------


@pytest.mark.parametrize("k,expected", [
    (1, "x"),
    (2, "2*x + x^2"),
    (3, "3*x + 3*x^2 + x^3"),
])
def test_adams_images_on_kcp3(k, expected):
    ring = kring(3)
    assert str(adams(ring, k)(ring.gen("x"))) == expected


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("n", range(1, 6))
def test_adams_matches_binomial_oracle(k, n):
    ring = kring(n)
    assert as_dense(adams(ring, k)(ring.gen("x")), n) == adams_image(k, n)


def test_adams_square_of_x():
    ring = kring(3)
    psi2 = adams(ring, 2)
    expected = dense_pow(adams_image(2, 3), 2, 3)
    assert expected == [0, 0, 4, 4]
    assert str(apply_operation(psi2, ring.gen("x") ** 2)) == "4*x^2 + 4*x^3"


def test_adams_zero_and_rejections():
    ring = kring(3)
    assert adams(ring, 3)(ring.zero()) == 0
    with pytest.raises(UnsupportedK):
        adams(ring, 0)
    with pytest.raises(UnsupportedK):
        adams(ring, -1)
    psi0 = adams(ring, 0, allow_degenerate=True)
    assert psi0(ring.gen("x")) == 0
    assert psi0(ring.one()) == 1


@pytest.mark.parametrize("n", range(0, 6))
def test_adams_identity_and_composition(n):
    ring = make_ring(Z, [poly("x", 0, n)]) if n else make_ring(Z, [])
    ops = {k: adams(ring, k) for k in (1, 2, 3, 4, 6, 9)}
    for m in ring.basis_elements():
        assert ops[1](m) == m
        for k, l in itertools.product((1, 2, 3), repeat=2):
            assert ops[k](ops[l](m)) == ops[k * l](m)


def test_operations_commute_with_restriction():
    for big, small in [(5, 3), (4, 1)]:
        f = restriction_map(kring(big), kring(small))
        for k in (2, 3, 5):
            src, tgt = adams(kring(big), k), adams(kring(small), k)
            for m in kring(big).basis_elements():
                assert tgt(f(m)) == f(src(m))
    r4 = make_ring(F2, [poly("a", 1, 4)])
    r2 = make_ring(F2, [poly("a", 1, 2)])
    f = restriction_map(r4, r2)
    for m in r4.basis_elements():
        assert total_sq(r2)(f(m)) == f(total_sq(r4)(m))


def test_integer_coefficients_pass_through():
    ring = kring(2)
    assert adams(ring, 5)(ring.scalar(7)) == 7


# -- formal operations ----------------------------------------------------------


def test_formal_operations_on_exterior():
    ring = make_ring(Z, [ext("s", 1), ext("u", 1)])
    s, u = ring.gens()
    op = make_formal_operation(ring, {"s": s, "u": u + s * u})
    assert (u + s * u) ** 2 == 0
    assert str(op(u)) == "u + s*u"
    swap = make_formal_operation(ring, {"u": s})
    assert swap(u) == s


def test_formal_operation_relation_violation():
    ring = kring(2)
    with pytest.raises(RelationViolation) as info:
        make_formal_operation(ring, {"x": 1 + ring.gen("x")})
    assert info.value.generator == "x"
    # (1 + x)^3 = 1 + 3x + 3x^2 in Z[x]/(x^3).
    assert str((1 + ring.gen("x")) ** 3) == "1 + 3*x + 3*x^2"


# -- total_sw ------------------------------------------------------------------------


def test_total_sw_examples():
    rp2 = SpaceModel((RP(2),), MOD2)
    assert str(total_sw(line(1), rp2)) == "1 + a"
    rp2rp2 = SpaceModel((RP(2), RP(2)), MOD2)
    assert str(total_sw(line(1, 2), rp2rp2)) == "1 + a + b + a*b"
    point = SpaceModel((RP(0),), MOD2)
    assert str(total_sw(line(1), point)) == "1"


def test_total_sw_of_complex_line_realification():
    cp2 = SpaceModel((CP(2),), MOD2)
    assert str(total_sw(line(1, 1), cp2)) == "1 + a^2"


def test_opkind_parse():
    assert OpKind.parse("sq") == OpKind("sq")
    assert OpKind.parse("psi:3") == OpKind("psi", 3)
    assert str(OpKind.parse(" psi : 5 ")) == "psi:5"
    assert OpKind.parse("psi:2").theory == "ktheory"
