import random

import pytest

from lambdakit.gf import FieldSpec
from lambdakit.poly import MPoly, PolyRing
from lambdakit.ratfunc import AmbientField, RatFunc


@pytest.fixture(scope="session")
def F2():
    return FieldSpec.get(2)


@pytest.fixture(scope="session")
def F3():
    return FieldSpec.get(3)


@pytest.fixture(scope="session")
def F4():
    return FieldSpec.get(2, 2)


@pytest.fixture(scope="session")
def Kt(F2):
    return AmbientField.get(F2, ("t",))


@pytest.fixture(scope="session")
def Kst(F2):
    return AmbientField.get(F2, ("s", "t"))


@pytest.fixture(scope="session")
def K3t(F3):
    return AmbientField.get(F3, ("t",))


def random_poly(ring: PolyRing, rng: random.Random, max_deg=3, max_terms=4) -> MPoly:
    spec = ring.spec
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exp = tuple(rng.randint(0, max_deg) for _ in range(ring.nvars))
        coeff = spec.elem(rng.randrange(1, spec.q)) if spec.m > 1 \
            else spec.elem(rng.randrange(1, spec.p))
        terms[exp] = coeff
    return MPoly(ring, terms)


def random_ratfunc(amb: AmbientField, rng: random.Random, max_deg=3,
                   max_terms=3) -> RatFunc:
    num = random_poly(amb.ring, rng, max_deg, max_terms)
    den = random_poly(amb.ring, rng, max_deg, max_terms)
    while den.is_zero():
        den = random_poly(amb.ring, rng, max_deg, max_terms)
    return amb.rat(num, den)
