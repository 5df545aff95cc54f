import itertools
import random

import pytest

from lambdakit.gf import FieldSpec
from lambdakit.poly import GREVLEX, PolyRing, render_poly
from lambdakit.ratfunc import AmbientField
from lambdakit.subfield import (MembershipWitness, SubfieldPresentation,
                                field_equal, field_leq, member,
                                minimal_polynomial, prime_subfield,
                                relation_ideal, trdeg, witness_ring)

from conftest import random_ratfunc


def test_member_examples(Kt):
    t = Kt.var(0)
    D = SubfieldPresentation(Kt, (t ** 2,))
    w = member(t ** 4, D)
    assert w is not None
    assert str(w) == "y1^2"
    assert member(t, D) is None
    E = SubfieldPresentation(Kt, (t ** 3, t ** 5))
    w = member(t ** 3, E)
    assert w is not None and w.evaluate(E.gens, Kt) == t ** 3


def test_member_witness_soundness(Kt, Kst):
    rng = random.Random(41)
    t = Kt.var(0)
    for amb in (Kt, Kst):
        for _ in range(15):
            g1 = random_ratfunc(amb, rng, max_deg=2, max_terms=2)
            g2 = random_ratfunc(amb, rng, max_deg=2, max_terms=2)
            D = SubfieldPresentation(amb, (g1, g2))
            # an element built from the generators must come back a member
            x = (g1 * g2 + g1) / (g2 ** 2 + amb.one) if not (g2 ** 2 + amb.one).is_zero() else g1
            w = member(x, D)
            assert w is not None
            assert w.evaluate(D.gens, amb) == x


def test_field_leq_examples(Kt):
    t = Kt.var(0)
    D4 = SubfieldPresentation(Kt, (t ** 4,))
    D2 = SubfieldPresentation(Kt, (t ** 2,))
    assert field_leq(D4, D2)
    assert not field_leq(D2, D4)
    assert field_leq(D2, D2)
    assert field_equal(SubfieldPresentation(Kt, (t, t ** 2)),
                       SubfieldPresentation(Kt, (t,)))


def test_relation_ideal_and_trdeg(Kt, Kst):
    t = Kt.var(0)
    D = SubfieldPresentation(Kt, (t, t ** 2))
    ideal = relation_ideal(D)
    assert [render_poly(g) for g in ideal.generators] == ["y1^2 + y2"]
    assert trdeg(D) == 1
    # t^p is transcendental: Jacobian rank would say 0, the staircase says 1
    Dp = SubfieldPresentation(Kt, (t ** 2,))
    assert relation_ideal(Dp).generators == []
    assert trdeg(Dp) == 1
    assert trdeg(prime_subfield(Kt)) == 0
    s2, t2 = Kst.gens()
    assert trdeg(SubfieldPresentation(Kst, (s2, t2))) == 2
    assert trdeg(SubfieldPresentation(Kst, (s2, s2 * t2, t2 ** 3))) == 2


def test_trdeg_jump_at_most_one(Kst):
    rng = random.Random(43)
    for _ in range(10):
        gens = tuple(random_ratfunc(Kst, rng, max_deg=2, max_terms=2)
                     for _ in range(2))
        D = SubfieldPresentation(Kst, gens)
        x = random_ratfunc(Kst, rng, max_deg=2, max_terms=2)
        jump = trdeg(D.adjoin(x)) - trdeg(D)
        assert jump in (0, 1)
        assert (minimal_polynomial(x, D) is None) == (jump == 1)


def test_minimal_polynomial_examples(Kt, Kst):
    t = Kt.var(0)
    mp = minimal_polynomial(t, SubfieldPresentation(Kt, (t ** 2,)))
    assert mp.degree == 2 and not mp.separable
    vals = mp.coefficient_values(SubfieldPresentation(Kt, (t ** 2,)))
    assert vals[0] == t ** 2 and vals[1].is_zero()  # X^2 + t^2
    mp = minimal_polynomial(t, SubfieldPresentation(Kt, (t ** 2 + t,)))
    assert mp.degree == 2 and mp.separable
    vals = mp.coefficient_values(SubfieldPresentation(Kt, (t ** 2 + t,)))
    assert vals[0] == t ** 2 + t and vals[1] == Kt.one  # X^2 + X + (t^2+t)
    s2, t2 = Kst.gens()
    assert minimal_polynomial(t2, SubfieldPresentation(Kst, (s2,))) is None


def test_minimal_polynomial_degree_matches_staircase(Kt):
    t = Kt.var(0)
    cases = [
        (t, (t ** 3,), 3),
        (t, (t ** 2,), 2),
        (t, (t ** 2 + t,), 2),
        (t ** 2, (t ** 6, t ** 10), 1),
        (t, (t ** 4,), 4),
    ]
    for x, gens, want in cases:
        D = SubfieldPresentation(Kt, gens)
        mp = minimal_polynomial(x, D)
        assert mp is not None and mp.degree == want
        # degree-1 means membership
        assert (mp.degree == 1) == (member(x, D) is not None)


def brute_force_member(x, gens, amb, max_deg=3):
    """Oracle: search P, Q in F_2[y1,y2] (deg <= max_deg) with Q(g) != 0 and
    x = P(g)/Q(g), by indexing all values of P against x * values of Q."""
    k = len(gens)
    ring = PolyRing.get(amb.spec, tuple(f"y{i+1}" for i in range(k)))
    monos = [e for e in itertools.product(range(max_deg + 1), repeat=k)
             if sum(e) <= max_deg]
    polys = []
    for bits in itertools.product(range(amb.spec.p), repeat=len(monos)):
        terms = {e: amb.spec.elem(c) for e, c in zip(monos, bits) if c}
        polys.append(ring.zero if not terms else
                     ring.zero.__class__(ring, terms))
    values = {}
    for P in polys:
        v = P.evaluate(gens, coeff_map=amb.const, zero=amb.zero)
        values.setdefault(v, P)
    for Q in polys:
        qv = Q.evaluate(gens, coeff_map=amb.const, zero=amb.zero)
        if qv.is_zero():
            continue
        if x * qv in values:
            return True
    return False


def test_member_agrees_with_brute_force_corpus(Kt):
    t = Kt.var(0)
    one = Kt.one
    rng = random.Random(47)
    gen_pool = [t ** 2, t ** 3, t ** 2 + t, t ** 4, t, one / (t + one),
                t ** 2 + one, (t ** 2 + t) / (t + one)]
    cases = []
    for _ in range(50):
        k = rng.randint(1, 2)
        gens = tuple(rng.choice(gen_pool) for _ in range(k))
        x = rng.choice(gen_pool + [t ** 6, t ** 5, (t ** 4 + t ** 2) / (t ** 2 + one)])
        cases.append((x, gens))
    for x, gens in cases:
        D = SubfieldPresentation(Kt, gens)
        got = member(x, D) is not None
        want = brute_force_member(x, gens, Kt)
        assert got == want, (str(x), [str(g) for g in gens])


def test_witness_rendering(Kt):
    t = Kt.var(0)
    ring = witness_ring(Kt, 1)
    w = MembershipWitness(ring.var(0) ** 2, ring.one)
    assert str(w) == "y1^2"
