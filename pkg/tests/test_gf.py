import itertools

import pytest
from hypothesis import given, strategies as st

from lambdakit.errors import DivisionByZero, SpecMismatch
from lambdakit.gf import _MODULUS_TABLE, FieldSpec, FqElem, fq_arith


def test_fq_arith_examples(F2, F3, F4):
    one2 = F2.one
    assert fq_arith("add", one2, one2) == F2.zero
    assert fq_arith("inv", F3.elem(2)) == F3.elem(2)
    a = F4.gen
    assert fq_arith("mul", a, a) == a + F4.one


def test_frobenius_inv_examples(F2, F3, F4):
    assert F2.one.frobenius_inv() == F2.one
    assert F3.elem(2).frobenius_inv() == F3.elem(2)
    assert (F4.gen + F4.one).frobenius_inv() == F4.gen


def test_inv_zero_raises(F2):
    with pytest.raises(DivisionByZero):
        F2.zero.inv()


def test_spec_mismatch(F2, F3):
    with pytest.raises(SpecMismatch):
        fq_arith("add", F2.one, F3.one)


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (2, 2), (2, 3), (2, 4),
                                 (3, 2), (5, 1), (7, 1)])
def test_field_axioms_exhaustive(p, m):
    spec = FieldSpec.get(p, m)
    if spec.q > 16:
        pytest.skip("axioms run exhaustively for q <= 16 only")
    els = spec.elements()
    for x, y, z in itertools.product(els, repeat=3):
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
    for x, y in itertools.product(els, repeat=2):
        assert x + y == y + x
        assert x * y == y * x
    for x in els:
        assert x + spec.zero == x
        assert x * spec.one == x
        assert x + (-x) == spec.zero
        if not x.is_zero():
            assert x * x.inv() == spec.one


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 3), (2, 4),
                                 (3, 1), (3, 2), (3, 4), (5, 2), (7, 2)])
def test_frobenius_inverse_exhaustive(p, m):
    spec = FieldSpec.get(p, m)
    if spec.q > 81:
        pytest.skip("exhaustive frobenius check bounded at q <= 81")
    for x in spec.elements():
        assert x.frobenius_inv() ** p == x
        assert x ** spec.q == x


def _poly_divides(f, g, p):
    """Does g (monic, coeff lists ascending, over F_p) divide f?"""
    f = list(f)
    while len(f) >= len(g):
        c = f[-1]
        if c:
            k = len(f) - len(g)
            for i, x in enumerate(g):
                f[k + i] = (f[k + i] - c * x) % p
        f.pop()
    return all(c == 0 for c in f)


def test_modulus_table_entries_irreducible():
    for (p, m), coeffs in _MODULUS_TABLE.items():
        f = list(coeffs) + [1]
        for d in range(1, m // 2 + 1):
            for cs in itertools.product(range(p), repeat=d):
                g = list(cs) + [1]
                assert not _poly_divides(f, g, p), (p, m, cs)


def test_reject_unsupported_specs():
    with pytest.raises(ValueError):
        FieldSpec.get(4)       # not prime
    with pytest.raises(ValueError):
        FieldSpec.get(2, 5)    # degree beyond the modulus table
    with pytest.raises(ValueError):
        FieldSpec.get(11, 2)   # extension of a prime without a table entry
    FieldSpec.get(11)          # prime fields of any table-free p are fine


@given(st.integers(0, 80), st.integers(0, 80))
def test_f81_add_mul_consistent_with_coeffs(a, b):
    spec = FieldSpec.get(3, 4)
    x, y = spec.elem(a), spec.elem(b)
    s = x + y
    assert s.coeffs() == tuple((u + v) % 3 for u, v in zip(x.coeffs(), y.coeffs()))
    if not x.is_zero():
        assert x * x.inv() == spec.one
