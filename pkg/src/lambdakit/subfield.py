"""Finitely generated subfields D = GF(q)(g1,...,gk) of the ambient field.

Membership, comparison, transcendence degree and minimal polynomials all run
through relation ideals: the kernel of y_i -> g_i in GF(q)[t, y], computed by
saturating the tag ideal <den(g_i)*y_i - num(g_i)> at the denominators and
eliminating the ambient variables.

Membership of x adjoins one more tag z (ordered above the y block); x lies in
D exactly when the reduced basis of the relation ideal of (x, g) contains an
element A(y)*z - ... of z-degree one, and then -B/A is a verified witness.
Every positive answer is re-checked by substitution; negative answers are
spot-checked at random rational points.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass

from .errors import SpecMismatch
from .gf import FqElem
from .poly import (DEFAULT_SPAIR_CAP, GREVLEX, Ideal, MPoly, MonomialOrder,
                   PolyRing, groebner_basis, render_poly, saturate_and_eliminate)
from .ratfunc import AmbientField, RatFunc


@dataclass(frozen=True)
class SubfieldPresentation:
    """D = GF(q)(gens) inside the ambient field; generator order matters only
    for deterministic output, not for the field itself."""
    ambient: AmbientField
    gens: tuple[RatFunc, ...]
    label: str | None = None

    def __post_init__(self):
        for g in self.gens:
            if g.ambient is not self.ambient:
                raise SpecMismatch("generator outside the ambient field")

    def adjoin(self, *xs: RatFunc) -> "SubfieldPresentation":
        return SubfieldPresentation(self.ambient, self.gens + tuple(xs))

    def __repr__(self):
        inner = ", ".join(str(g) for g in self.gens)
        name = self.label or "GF(q)"
        return f"{name}({inner})" if inner else f"{name}()"


def prime_subfield(ambient: AmbientField) -> SubfieldPresentation:
    return SubfieldPresentation(ambient, ())


def whole_ambient(ambient: AmbientField) -> SubfieldPresentation:
    return SubfieldPresentation(ambient, ambient.gens())


def witness_ring(ambient: AmbientField, k: int) -> PolyRing:
    return PolyRing.get(ambient.spec, tuple(f"y{i + 1}" for i in range(k)))


@dataclass(frozen=True)
class MembershipWitness:
    """num/den polynomials in y1..yk with den(g) != 0 and num(g)/den(g)
    equal to the witnessed element."""
    num: MPoly
    den: MPoly

    def evaluate(self, gens: tuple[RatFunc, ...], amb: AmbientField) -> RatFunc:
        num = _eval_tag_poly(self.num, gens, amb)
        den = _eval_tag_poly(self.den, gens, amb)
        return num / den

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == self.den.ring.spec.one:
            return render_poly(self.num)
        return f"({render_poly(self.num)})/({render_poly(self.den)})"


def _eval_tag_poly(f: MPoly, gens: tuple[RatFunc, ...], amb: AmbientField) -> RatFunc:
    return f.evaluate(gens, coeff_map=amb.const, zero=amb.zero)


def _constant_witness(amb: AmbientField, x: RatFunc, k: int) -> MembershipWitness:
    ring = witness_ring(amb, k)
    return MembershipWitness(ring.const(x.num.constant_value()), ring.one)


# -- relation ideals -------------------------------------------------------

_QUERY_TAG = "z"


def _fresh_names(taken, base_names):
    out = []
    for name in base_names:
        fresh = name
        while fresh in taken or fresh in out:
            fresh = "_" + fresh
        out.append(fresh)
    return out


@functools.lru_cache(maxsize=4096)
def _relation_basis(amb: AmbientField, elements: tuple[RatFunc, ...],
                    with_query: bool, spair_cap: int):
    """Reduced Groebner basis of the ideal of algebraic relations among
    `elements`.

    with_query=False: relations among tags y1..yk for all elements, grevlex,
    in the ring GF(q)[y1..yk].
    with_query=True: elements[0] is tagged z and ordered above y1..y(k-1)
    (block order), so z-linear elements witness membership of elements[0] in
    the subfield generated by the rest.
    """
    n = amb.n
    k = len(elements)
    if with_query:
        tag_base = [_QUERY_TAG] + [f"y{i}" for i in range(1, k)]
    else:
        tag_base = [f"y{i + 1}" for i in range(k)]
    tag_names = _fresh_names(set(amb.ring.names), tag_base)
    big = PolyRing.get(amb.spec, amb.ring.names + tuple(tag_names))
    var_map = list(range(n))
    gens = []
    den_product = big.one
    for i, g in enumerate(elements):
        tag = big.var(n + i)
        num = g.num.map_ring(big, var_map)
        den = g.den.map_ring(big, var_map)
        gens.append(den * tag - num)
        den_product = den_product * den
    ideal = Ideal(big, gens)
    small = saturate_and_eliminate(ideal, den_product, tag_names, spair_cap)
    if with_query and k >= 1:
        order = MonomialOrder.block(1)
        gb = groebner_basis(small.generators, order, spair_cap)
        return small.ring, gb, order
    return small.ring, small.generators, GREVLEX


def relation_ideal(D: SubfieldPresentation,
                   spair_cap: int = DEFAULT_SPAIR_CAP) -> Ideal:
    """The ideal of all algebraic relations among gens(D), as a reduced
    grevlex basis in GF(q)[y1..yk]."""
    ring, gb, _ = _relation_basis(D.ambient, D.gens, False, spair_cap)
    ideal = Ideal(ring, gb)
    ideal._gb[GREVLEX] = list(gb)
    return ideal


def staircase_dimension(ring: PolyRing, gb) -> int:
    """Krull dimension from the leading-term staircase of a grevlex basis:
    the largest set S of variables such that no leading monomial is
    supported inside S."""
    if any(g.is_constant() and not g.is_zero() for g in gb):
        return -1  # unit ideal
    lms = [g.leading_exp(GREVLEX) for g in gb if not g.is_zero()]
    supports = [frozenset(i for i, d in enumerate(e) if d) for e in lms]
    nvars = ring.nvars
    for size in range(nvars, -1, -1):
        for subset in itertools.combinations(range(nvars), size):
            sset = set(subset)
            if all(not sup <= sset for sup in supports):
                return size
    return 0


def trdeg(D: SubfieldPresentation, spair_cap: int = DEFAULT_SPAIR_CAP) -> int:
    """Transcendence degree of D over the constant field, via the staircase
    dimension of the relation ideal (never by Jacobian rank: inseparable
    generators such as t^p would break that)."""
    if not D.gens:
        return 0
    ring, gb, _ = _relation_basis(D.ambient, D.gens, False, spair_cap)
    return staircase_dimension(ring, gb)


# -- membership ------------------------------------------------------------


def _spot_check_vanishing(amb: AmbientField, values: list[RatFunc], gb,
                          rounds: int = 4):
    """Evaluate relation-basis elements at random rational specializations of
    the ambient variables; they must vanish at the generic point's image."""
    rng = random.Random(0xA11CE)
    spec = amb.spec
    for _ in range(rounds):
        point = [FqElem(spec, rng.randrange(spec.q)) for _ in range(amb.n)]
        vals = []
        ok = True
        for v in values:
            den = v.den.evaluate(point, zero=spec.zero)
            if den.is_zero():
                ok = False
                break
            vals.append(v.num.evaluate(point, zero=spec.zero) / den)
        if not ok:
            continue
        for g in gb:
            out = g.evaluate(vals, zero=spec.zero)
            assert out.is_zero(), \
                "relation basis fails to vanish at a rational specialization"


def _member_impl(x: RatFunc, gens: tuple[RatFunc, ...],
                 spair_cap: int) -> MembershipWitness | None:
    amb = x.ambient
    k = len(gens)
    if x.is_constant():
        return _constant_witness(amb, x, k)
    if k == 0:
        return None
    ring, gb, order = _relation_basis(amb, (x,) + gens, True, spair_cap)
    linear = [g for g in gb if g.degree_in(0) == 1]
    if not linear:
        _spot_check_vanishing(amb, [x] + list(gens), gb)
        return None
    h = min(linear, key=lambda g: order.key(g.leading_exp(order)))
    wring = witness_ring(amb, k)
    a_terms, b_terms = {}, {}
    for e, c in h.terms.items():
        tail = tuple(e[1:])
        if e[0] == 1:
            a_terms[tail] = c
        else:
            b_terms[tail] = c
    a = MPoly(wring, a_terms)
    b = MPoly(wring, b_terms)
    witness = MembershipWitness(-b, a)
    den_val = _eval_tag_poly(a, gens, amb)
    if den_val.is_zero():
        raise AssertionError("membership witness denominator vanished at the generators")
    if witness.evaluate(gens, amb) != x:
        raise AssertionError("membership witness failed re-evaluation")
    return witness


@functools.lru_cache(maxsize=65536)
def _member_cached(x: RatFunc, gens: tuple[RatFunc, ...], spair_cap: int):
    return _member_impl(x, gens, spair_cap)


def member(x: RatFunc, D: SubfieldPresentation,
           spair_cap: int = DEFAULT_SPAIR_CAP) -> MembershipWitness | None:
    """Decide x in GF(q)(gens); a verified witness on success, None if not."""
    if x.ambient is not D.ambient:
        raise SpecMismatch("element and subfield from different ambients")
    return _member_cached(x, D.gens, spair_cap)


def field_leq(D1: SubfieldPresentation, D2: SubfieldPresentation,
              spair_cap: int = DEFAULT_SPAIR_CAP) -> bool:
    if D1.ambient is not D2.ambient:
        raise SpecMismatch("subfields of different ambients")
    return all(member(g, D2, spair_cap) is not None for g in D1.gens)


def field_equal(D1: SubfieldPresentation, D2: SubfieldPresentation,
                spair_cap: int = DEFAULT_SPAIR_CAP) -> bool:
    return field_leq(D1, D2, spair_cap) and field_leq(D2, D1, spair_cap)


# -- minimal polynomials ----------------------------------------------------


@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic minimal polynomial of an element over D: X^degree plus lower
    coefficients given as witnesses in D (index j = coefficient of X^j)."""
    degree: int
    coeffs: tuple[MembershipWitness, ...]
    separable: bool

    def coefficient_values(self, D: SubfieldPresentation) -> list[RatFunc]:
        return [w.evaluate(D.gens, D.ambient) for w in self.coeffs]


def minimal_polynomial(x: RatFunc, D: SubfieldPresentation,
                       spair_cap: int = DEFAULT_SPAIR_CAP) -> MinimalPolynomial | None:
    """None when x is transcendental over D, detected by a transcendence
    degree jump; otherwise the monic minimal polynomial with coefficient
    witnesses, plus a separability verdict from the formal derivative."""
    if x.ambient is not D.ambient:
        raise SpecMismatch("element and subfield from different ambients")
    amb = x.ambient
    k = len(D.gens)
    if trdeg(D.adjoin(x), spair_cap) > trdeg(D, spair_cap):
        return None
    wring = witness_ring(amb, k)
    if x.is_constant() or member(x, D, spair_cap) is not None:
        w = member(x, D, spair_cap)
        return MinimalPolynomial(1, (MembershipWitness(-w.num, w.den),), True)
    ring, gb, order = _relation_basis(amb, (x,) + D.gens, True, spair_cap)
    with_z = [g for g in gb if g.degree_in(0) >= 1]
    if not with_z:
        raise AssertionError("algebraic element produced no z-relation")
    d = min(g.degree_in(0) for g in with_z)
    candidates = [g for g in with_z if g.degree_in(0) == d]
    h = min(candidates, key=lambda g: order.key(g.leading_exp(order)))
    by_deg: dict[int, dict] = {}
    for e, c in h.terms.items():
        by_deg.setdefault(e[0], {})[tuple(e[1:])] = c
    lead = MPoly(wring, by_deg.get(d, {}))
    coeffs = []
    exponents_nonzero = []
    for j in range(d):
        aj = MPoly(wring, by_deg.get(j, {}))
        if not aj.is_zero():
            exponents_nonzero.append(j)
        coeffs.append(MembershipWitness(aj, lead))
    p = amb.spec.p
    separable = (d % p != 0) or any(j % p != 0 for j in exponents_nonzero if j >= 1)
    result = MinimalPolynomial(d, tuple(coeffs), separable)
    # soundness: the polynomial must vanish at x
    acc = x ** d
    for j, w in enumerate(result.coeffs):
        acc = acc + w.evaluate(D.gens, amb) * x ** j
    if not acc.is_zero():
        raise AssertionError("minimal polynomial failed to vanish at its element")
    return result


def is_separably_algebraic(x: RatFunc, D: SubfieldPresentation,
                           spair_cap: int = DEFAULT_SPAIR_CAP) -> bool:
    mp = minimal_polynomial(x, D, spair_cap)
    return mp is not None and mp.separable
