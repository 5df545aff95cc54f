import random

import pytest

from lambdakit.errors import ResourceLimit
from lambdakit.gf import FieldSpec
from lambdakit.poly import (GREVLEX, LEX, Ideal, MonomialOrder, MPoly,
                            PolyRing, exact_div, groebner_basis, mpoly_gcd,
                            p_power_decompose, poly_reduce, render_poly,
                            saturate_and_eliminate)

from conftest import random_poly


@pytest.fixture
def Rxy(F2):
    return PolyRing.get(F2, ("x", "y"))


def test_reduce_examples(Rxy):
    x, y = Rxy.gens()
    assert poly_reduce(x * x, [x], LEX).is_zero()
    r = poly_reduce(x * x + y, [x - y], LEX)
    assert r == y * y + y
    assert poly_reduce(y, [x], LEX) == y


def test_groebner_examples(F2, Rxy):
    x, y = Rxy.gens()
    assert groebner_basis([x - y], LEX) == [x + y]  # char 2: x - y == x + y
    gb = groebner_basis([x * x + Rxy.one, x * y + Rxy.one], LEX)
    assert [render_poly(g, LEX) for g in gb] == ["x + y", "y^2 + 1"]
    assert groebner_basis([Rxy.one], LEX) == [Rxy.one]
    assert groebner_basis([], LEX) == []


def test_groebner_generators_reduce_to_zero(F2):
    ring = PolyRing.get(F2, ("x", "y", "z"))
    rng = random.Random(7)
    for _ in range(20):
        gens = [random_poly(ring, rng) for _ in range(3)]
        gb = groebner_basis(gens, GREVLEX)
        for g in gens:
            assert poly_reduce(g, gb, GREVLEX).is_zero()


def test_normal_form_additive(F2):
    ring = PolyRing.get(F2, ("x", "y"))
    rng = random.Random(3)
    gens = [random_poly(ring, rng) for _ in range(2)]
    gb = groebner_basis(gens, GREVLEX)
    for _ in range(30):
        f = random_poly(ring, rng)
        g = random_poly(ring, rng)
        lhs = poly_reduce(f + g, gb, GREVLEX)
        rhs = poly_reduce(f, gb, GREVLEX) + poly_reduce(g, gb, GREVLEX)
        assert lhs == rhs


def test_reduced_basis_canonical_under_permutation(F3):
    ring = PolyRing.get(F3, ("x", "y", "z"))
    rng = random.Random(11)
    for _ in range(10):
        gens = [random_poly(ring, rng) for _ in range(3)]
        base = groebner_basis(gens, GREVLEX)
        for _ in range(4):
            rng.shuffle(gens)
            assert groebner_basis(gens, GREVLEX) == base


def test_spair_cap(F2):
    ring = PolyRing.get(F2, ("x", "y", "z"))
    rng = random.Random(1)
    gens = [random_poly(ring, rng, max_deg=4) for _ in range(4)]
    with pytest.raises(ResourceLimit):
        groebner_basis(gens, GREVLEX, spair_cap=0)


def test_saturate_and_eliminate_examples(F2):
    ring = PolyRing.get(F2, ("x", "t"))
    x, t = ring.gens()
    # already saturated
    out = saturate_and_eliminate(Ideal(ring, [x * t - ring.one]), t, ["x", "t"])
    assert out.generators == [x * t + ring.one]
    # (<t*x> : t^inf) = <x>
    out = saturate_and_eliminate(Ideal(ring, [t * x]), t, ["x"])
    assert [render_poly(g) for g in out.generators] == ["x"]
    # x = t^2 imposes nothing on x alone
    out = saturate_and_eliminate(Ideal(ring, [x - t * t]), None, ["x"])
    assert out.generators == []


def test_p_power_decompose_examples(F2, F3):
    ring = PolyRing.get(F2, ("t",))
    t = ring.var(0)
    u = t ** 3 + t ** 2 + ring.one
    parts = p_power_decompose(u)
    assert parts == {(0,): t + ring.one, (1,): t}
    assert p_power_decompose(t ** 2) == {(0,): t}
    ring3 = PolyRing.get(F3, ("s", "t"))
    s3, t3 = ring3.gens()
    assert p_power_decompose(s3 * t3) == {(1, 1): ring3.one}


def test_p_power_reconstruction_random(F2, F3):
    for spec in (F2, F3):
        ring = PolyRing.get(spec, ("s", "t"))
        rng = random.Random(5)
        p = spec.p
        for _ in range(500):
            u = random_poly(ring, rng, max_deg=6, max_terms=5)
            parts = p_power_decompose(u)
            acc = ring.zero
            for idx, piece in parts.items():
                acc = acc + ring.monomial(idx) * piece ** p
            assert acc == u


def test_exact_div_and_gcd(F2, F3):
    ring = PolyRing.get(F3, ("x", "y"))
    x, y = ring.gens()
    f = (x + y) ** 2 * (x - y)
    g = (x + y) * (x + ring.one)
    d = mpoly_gcd(f, g)
    assert d == x + y
    assert exact_div(f, d) * d == f
    rng = random.Random(13)
    for _ in range(40):
        a = random_poly(ring, rng)
        b = random_poly(ring, rng)
        c = random_poly(ring, rng)
        g = mpoly_gcd(a * c, b * c)
        # gcd must be divisible by c and divide both products
        assert exact_div(g, mpoly_gcd(g, c)) is not None
        assert exact_div(a * c, g) * g == a * c
        assert exact_div(b * c, g) * g == b * c


def test_block_order_is_elimination_order(F2):
    order = MonomialOrder.block(2)
    hi = (0, 1, 0, 0)   # contains an eliminated variable
    lo = (0, 0, 9, 9)   # only kept variables
    assert order.key(hi) > order.key(lo)


def test_grevlex_classic_order():
    key = GREVLEX.key
    assert key((2, 0)) > key((1, 1)) > key((0, 2)) > key((1, 0)) > key((0, 1))
