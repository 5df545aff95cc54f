"""Sparse multivariate polynomials over GF(q).

Provides monomial orders (lex, grevlex, block elimination), normal forms,
Buchberger's algorithm with Gebauer-Moeller pair elimination, saturation +
elimination of ideals, multivariate gcd, exact division, and decomposition
of a polynomial into p-th-power components along the coordinate variables.

Everything here is deterministic: reduced Groebner bases are canonical
(monic, auto-reduced, sorted by leading monomial) so equal ideals produce
bitwise equal bases regardless of generator order.
"""

from __future__ import annotations

import heapq
import itertools

from .errors import DivisionByZero, ResourceLimit, SpecMismatch
from .gf import FieldSpec, FqElem

_RING_CACHE: dict[tuple, "PolyRing"] = {}


class PolyRing:
    """GF(q)[names]; interned by (field, names) so `is` comparison works."""

    __slots__ = ("spec", "names", "nvars", "zero", "one", "_zero_exp")

    @staticmethod
    def get(spec: FieldSpec, names) -> "PolyRing":
        key = (spec.p, spec.m, tuple(names))
        ring = _RING_CACHE.get(key)
        if ring is None:
            ring = PolyRing(spec, tuple(names))
            _RING_CACHE[key] = ring
        return ring

    def __init__(self, spec: FieldSpec, names: tuple[str, ...]):
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        self.spec = spec
        self.names = names
        self.nvars = len(names)
        self._zero_exp = (0,) * self.nvars
        self.zero = MPoly(self, {})
        self.one = MPoly(self, {self._zero_exp: spec.one})

    def const(self, c: FqElem) -> "MPoly":
        if c.spec is not self.spec:
            raise SpecMismatch("constant from a different field")
        if c.is_zero():
            return self.zero
        return MPoly(self, {self._zero_exp: c})

    def int_const(self, n: int) -> "MPoly":
        return self.const(FqElem(self.spec, n % self.spec.p))

    def var(self, i: int) -> "MPoly":
        e = [0] * self.nvars
        e[i] = 1
        return MPoly(self, {tuple(e): self.spec.one})

    def monomial(self, exp, coeff: FqElem | None = None) -> "MPoly":
        c = self.spec.one if coeff is None else coeff
        if c.is_zero():
            return self.zero
        return MPoly(self, {tuple(exp): c})

    def gens(self) -> list["MPoly"]:
        return [self.var(i) for i in range(self.nvars)]

    def __repr__(self):
        return f"{self.spec!r}[{', '.join(self.names)}]"

    def __reduce__(self):
        return (PolyRing.get, (self.spec, self.names))


class MonomialOrder:
    """Total, multiplicative, well-founded order on exponent vectors.

    kinds: 'lex', 'grevlex', and 'block' (elimination order: compare the
    variables before each split point first, grevlex within each block).
    """

    __slots__ = ("kind", "splits",)

    def __init__(self, kind: str, splits: tuple[int, ...] = ()):
        if kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown order kind {kind!r}")
        self.kind = kind
        self.splits = splits

    @staticmethod
    def lex() -> "MonomialOrder":
        return MonomialOrder("lex")

    @staticmethod
    def grevlex() -> "MonomialOrder":
        return MonomialOrder("grevlex")

    @staticmethod
    def block(*splits: int) -> "MonomialOrder":
        """Elimination order with blocks [0:s1), [s1:s2), ..., grevlex inside."""
        return MonomialOrder("block", tuple(splits))

    def key(self, exp: tuple[int, ...]):
        if self.kind == "lex":
            return exp
        if self.kind == "grevlex":
            return _grevlex_key(exp)
        parts = []
        lo = 0
        for s in self.splits:
            parts.append(_grevlex_key(exp[lo:s]))
            lo = s
        parts.append(_grevlex_key(exp[lo:]))
        return tuple(parts)

    def __repr__(self):
        if self.kind == "block":
            return f"block{self.splits}"
        return self.kind

    def __eq__(self, other):
        return (isinstance(other, MonomialOrder) and other.kind == self.kind
                and other.splits == self.splits)

    def __hash__(self):
        return hash((self.kind, self.splits))


def _grevlex_key(exp):
    return (sum(exp), tuple(-e for e in reversed(exp)))


def _negate_key(k):
    """Elementwise negation of a (nested) key tuple reverses the lexicographic
    comparison, turning heapq's min-heap into a max-heap on monomials."""
    if isinstance(k, int):
        return -k
    return tuple(_negate_key(x) for x in k)


class _MonomialHeap:
    """Max-heap of exponent vectors under a monomial order, with lazy
    deletions (membership is re-checked against the term dict by callers)."""

    __slots__ = ("order", "cache", "heap")

    def __init__(self, order: MonomialOrder, exps=()):
        self.order = order
        self.cache: dict = {}
        self.heap = [(self._nk(e), e) for e in exps]
        heapq.heapify(self.heap)

    def _nk(self, e):
        k = self.cache.get(e)
        if k is None:
            k = _negate_key(self.order.key(e))
            self.cache[e] = k
        return k

    def push(self, e):
        heapq.heappush(self.heap, (self._nk(e), e))

    def pop(self):
        return heapq.heappop(self.heap)[1]

    def __bool__(self):
        return bool(self.heap)


GREVLEX = MonomialOrder.grevlex()
LEX = MonomialOrder.lex()


class MPoly:
    """Immutable sparse polynomial: {exponent vector -> nonzero coefficient}."""

    __slots__ = ("ring", "terms", "_hash", "_lead")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None
        self._lead = None

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring._zero_exp in self.terms)

    def constant_value(self) -> FqElem:
        if self.is_zero():
            return self.ring.spec.zero
        return self.terms[self.ring._zero_exp]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def variables_used(self) -> set[int]:
        used = set()
        for e in self.terms:
            for i, d in enumerate(e):
                if d:
                    used.add(i)
        return used

    # -- arithmetic ------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, MPoly):
            raise TypeError(f"cannot combine MPoly with {type(other).__name__}")
        if other.ring is not self.ring:
            raise SpecMismatch(f"mixed rings {self.ring} and {other.ring}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            if cur is None:
                out[e] = c
            else:
                s = cur + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
        return MPoly(self.ring, out)

    def __neg__(self):
        return MPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                c = c1 * c2
                cur = out.get(e)
                if cur is None:
                    out[e] = c
                else:
                    s = cur + c
                    if s.is_zero():
                        del out[e]
                    else:
                        out[e] = s
        return MPoly(self.ring, out)

    def scale(self, c: FqElem) -> "MPoly":
        if c.is_zero():
            return self.ring.zero
        return MPoly(self.ring, {e: k * c for e, k in self.terms.items()})

    def mul_term(self, exp: tuple[int, ...], c: FqElem) -> "MPoly":
        if c.is_zero():
            return self.ring.zero
        return MPoly(self.ring, {tuple(x + y for x, y in zip(e, exp)): k * c
                                 for e, k in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- leading data ----------------------------------------------------

    def leading_exp(self, order: MonomialOrder) -> tuple[int, ...]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        cache = self._lead
        if cache is None:
            cache = self._lead = {}
        got = cache.get(order)
        if got is None:
            got = max(self.terms, key=order.key)
            cache[order] = got
        return got

    def leading_coeff(self, order: MonomialOrder) -> FqElem:
        return self.terms[self.leading_exp(order)]

    def monic(self, order: MonomialOrder = GREVLEX) -> "MPoly":
        if self.is_zero():
            return self
        return self.scale(self.leading_coeff(order).inv())

    def sorted_terms(self, order: MonomialOrder = GREVLEX):
        """Terms in descending order; the canonical rendering order."""
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    # -- calculus, evaluation, structure ----------------------------------

    def derivative(self, i: int) -> "MPoly":
        spec = self.ring.spec
        out: dict = {}
        for e, c in self.terms.items():
            d = e[i]
            if d == 0:
                continue
            k = c * FqElem(spec, d % spec.p)
            if k.is_zero():
                continue
            e2 = list(e)
            e2[i] = d - 1
            e2 = tuple(e2)
            cur = out.get(e2)
            out[e2] = k if cur is None else cur + k
        return MPoly(self.ring, {e: c for e, c in out.items() if not c.is_zero()})

    def evaluate(self, values, coeff_map=None, zero=None):
        """Evaluate at a point.  `values[i]` must support + and *, and
        `coeff_map` lifts an FqElem coefficient into that arithmetic
        (identity by default).  `zero` is returned for the zero polynomial.
        Powers are computed by repeated squaring."""
        if coeff_map is None:
            coeff_map = lambda c: c
        if not self.terms:
            return zero if zero is not None else coeff_map(self.ring.spec.zero)
        total = None
        pow_cache: dict[tuple[int, int], object] = {}

        def vpow(i, n):
            got = pow_cache.get((i, n))
            if got is not None:
                return got
            if n == 1:
                r = values[i]
            else:
                half = vpow(i, n // 2)
                r = half * half
                if n % 2:
                    r = r * values[i]
            pow_cache[(i, n)] = r
            return r

        for e, c in self.sorted_terms():
            term = coeff_map(c)
            for i, d in enumerate(e):
                if d:
                    term = term * vpow(i, d)
            total = term if total is None else total + term
        return total

    def map_ring(self, ring: PolyRing, var_map: list[int]) -> "MPoly":
        """Reinterpret in `ring`, sending our variable i to ring variable
        var_map[i].  Variables not mentioned must be unused."""
        out: dict = {}
        for e, c in self.terms.items():
            e2 = [0] * ring.nvars
            for i, d in enumerate(e):
                if d:
                    e2[var_map[i]] = d
            out[tuple(e2)] = c
        if len(out) != len(self.terms):
            raise ValueError("variable map collapsed distinct monomials")
        return MPoly(ring, out)

    # -- dunder plumbing ---------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, MPoly) and other.ring is self.ring
                and other.terms == self.terms)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((id(self.ring), frozenset((e, c.val) for e, c in self.terms.items())))
            self._hash = h
        return h

    def __str__(self):
        return render_poly(self)

    def __repr__(self):
        return f"<{render_poly(self)}>"


def render_poly(f: MPoly, order: MonomialOrder = GREVLEX) -> str:
    """Canonical string: terms descending in the order, coefficients in [0,p)."""
    if f.is_zero():
        return "0"
    parts = []
    names = f.ring.names
    for e, c in f.sorted_terms(order):
        factors = []
        coeff_str = str(c)
        if " " in coeff_str:  # extension-field element with several terms
            coeff_str = f"({coeff_str})"
        if all(d == 0 for d in e):
            factors.append(coeff_str)
        else:
            if coeff_str != "1":
                factors.append(coeff_str)
            for i, d in enumerate(e):
                if d == 1:
                    factors.append(names[i])
                elif d > 1:
                    factors.append(f"{names[i]}^{d}")
        parts.append("*".join(factors))
    return " + ".join(parts)


# -- division and normal forms ------------------------------------------


def _exp_divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _exp_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _exp_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _exp_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


# Exponent vectors are packed into one integer, one field of _PACK_BITS bits
# per variable with a guard bit, so divisibility is a borrow-free subtraction:
# le | e  iff  ((pack(e) | guards) - pack(le)) & guards == guards.
_PACK_BITS = 16
_PACK_LIMIT = 1 << (_PACK_BITS - 1)


def _packer(nvars: int):
    shifts = [i * _PACK_BITS for i in range(nvars)]
    guards = 0
    for s in shifts:
        guards |= 1 << (s + _PACK_BITS - 1)

    def pack(e):
        v = 0
        for x, s in zip(e, shifts):
            v |= x << s
        return v

    return pack, guards


def poly_reduce(f: MPoly, basis, order: MonomialOrder) -> MPoly:
    """Normal form of f modulo the list `basis`: no term of the result is
    divisible by a leading term of the basis.  Deterministic: reducers are
    tried in descending leading-monomial order."""
    ring = f.ring
    red = []
    for g in basis:
        if g.ring is not ring:
            raise SpecMismatch("basis polynomial from another ring")
        if not g.is_zero():
            red.append((g.leading_exp(order), g))
    red.sort(key=lambda t: order.key(t[0]), reverse=True)
    if not red:
        return f
    if ring.spec.m == 1:
        return _poly_reduce_prime(f, red, order)
    return _poly_reduce_generic(f, red, order)


def _poly_reduce_prime(f: MPoly, red, order: MonomialOrder) -> MPoly:
    """Prime-field reduction on plain integer coefficients (no element
    allocation in the inner loop)."""
    ring = f.ring
    spec = ring.spec
    p = spec.p
    pack, guards = _packer(ring.nvars)
    packed = [(pack(le) , le, g.terms[le].val,
               [(ge, gc.val) for ge, gc in g.terms.items() if ge != le])
              for le, g in red]

    remainder: dict = {}
    work = {e: c.val for e, c in f.terms.items()}
    heap = _MonomialHeap(order, work)
    while heap:
        e = heap.pop()
        c = work.pop(e, None)
        if c is None:
            continue
        if max(e, default=0) < _PACK_LIMIT:
            pe_or = pack(e) | guards
            hit = None
            for ple, le, lcv, tail in packed:
                if (pe_or - ple) & guards == guards:
                    hit = (le, lcv, tail)
                    break
        else:
            hit = None
            for _ple, le, lcv, tail in packed:
                if _exp_divides(le, e):
                    hit = (le, lcv, tail)
                    break
        if hit is None:
            remainder[e] = c
            continue
        le, lcv, tail = hit
        shift = _exp_sub(e, le)
        factor = (c * pow(lcv, p - 2, p)) % p
        for ge, gcv in tail:
            te = _exp_add(ge, shift)
            tv = (gcv * factor) % p
            cur = work.get(te)
            if cur is None:
                work[te] = p - tv
                heap.push(te)
            else:
                s = (cur - tv) % p
                if s:
                    work[te] = s
                else:
                    del work[te]
    return MPoly(ring, {e: FqElem(spec, v) for e, v in remainder.items()})


def _poly_reduce_generic(f: MPoly, red, order: MonomialOrder) -> MPoly:
    ring = f.ring
    pack, guards = _packer(ring.nvars)
    packed = [(pack(le), le, g.terms[le], g) for le, g in red]

    remainder: dict = {}
    work = dict(f.terms)
    heap = _MonomialHeap(order, work)
    while heap:
        e = heap.pop()
        c = work.pop(e, None)
        if c is None:
            continue  # stale heap entry
        if max(e, default=0) < _PACK_LIMIT:
            pe_or = pack(e) | guards
            hit = None
            for ple, le, lc, g in packed:
                if (pe_or - ple) & guards == guards:
                    hit = (le, lc, g)
                    break
        else:  # exponents beyond the packing width: plain comparison
            hit = None
            for _ple, le, lc, g in packed:
                if _exp_divides(le, e):
                    hit = (le, lc, g)
                    break
        if hit is None:
            remainder[e] = c
            continue
        le, lc, g = hit
        # f -= (c / lc(g)) * x^(e-le) * g; the term at e cancels
        shift = _exp_sub(e, le)
        factor = c / lc
        for ge, gc in g.terms.items():
            if ge == le:
                continue
            te = _exp_add(ge, shift)
            tc = gc * factor
            cur = work.get(te)
            if cur is None:
                work[te] = -tc
                heap.push(te)
            else:
                s = cur - tc
                if s.is_zero():
                    del work[te]
                else:
                    work[te] = s
    return MPoly(ring, remainder)


def s_poly(f: MPoly, g: MPoly, order: MonomialOrder) -> MPoly:
    ef = f.leading_exp(order)
    eg = g.leading_exp(order)
    lcm = _exp_lcm(ef, eg)
    mf = f.mul_term(_exp_sub(lcm, ef), f.terms[ef].inv())
    mg = g.mul_term(_exp_sub(lcm, eg), g.terms[eg].inv())
    return mf - mg


DEFAULT_SPAIR_CAP = 10**6


def groebner_basis(gens, order: MonomialOrder, spair_cap: int = DEFAULT_SPAIR_CAP):
    """The unique reduced Groebner basis of <gens>, sorted by descending
    leading monomial.  Buchberger with Gebauer-Moeller pair elimination and
    normal (smallest-lcm) selection.  Raises ResourceLimit past spair_cap."""
    basis: list[MPoly] = []
    lms: list[tuple[int, ...]] = []
    alive: set[tuple[int, int]] = set()
    pair_heap: list = []  # (lcm order key, i, j); lazy deletions via `alive`

    def add_poly(f: MPoly):
        nonlocal alive
        lmf = f.leading_exp(order)
        k = len(basis)
        # chain criterion: drop old pairs strictly refined by lmf
        kept = set()
        for (i, j) in alive:
            lcm_ij = _exp_lcm(lms[i], lms[j])
            if (_exp_divides(lmf, lcm_ij)
                    and lcm_ij != _exp_lcm(lms[i], lmf)
                    and lcm_ij != _exp_lcm(lms[j], lmf)):
                continue
            kept.add((i, j))
        alive = kept
        # group new pairs by lcm; keep one representative per minimal lcm
        by_lcm: dict[tuple[int, ...], list[int]] = {}
        for i in range(k):
            by_lcm.setdefault(_exp_lcm(lms[i], lmf), []).append(i)
        minimal: list[tuple[int, ...]] = []
        for lcm_e in sorted(by_lcm, key=order.key):
            if not any(_exp_divides(other, lcm_e) for other in minimal):
                minimal.append(lcm_e)
        for lcm_e in minimal:
            i = min(by_lcm[lcm_e])
            # product criterion: coprime leading monomials reduce to zero
            if _exp_add(lms[i], lmf) == lcm_e:
                continue
            alive.add((i, k))
            heapq.heappush(pair_heap, (order.key(lcm_e), i, k))
        basis.append(f)
        lms.append(lmf)

    for g in sorted((g for g in gens if not g.is_zero()),
                    key=lambda g: order.key(g.leading_exp(order))):
        add_poly(g.monic(order))
    if not basis:
        return []

    processed = 0
    while pair_heap:
        _, i, j = heapq.heappop(pair_heap)
        if (i, j) not in alive:
            continue
        alive.discard((i, j))
        processed += 1
        if processed > spair_cap:
            raise ResourceLimit(f"S-pair cap {spair_cap} exceeded")
        s = s_poly(basis[i], basis[j], order)
        r = poly_reduce(s, basis, order)
        if not r.is_zero():
            add_poly(r.monic(order))

    return interreduce(basis, order)


def interreduce(basis, order: MonomialOrder):
    """Minimalize and auto-reduce a Groebner basis into the reduced GB."""
    polys = [g.monic(order) for g in basis if not g.is_zero()]
    # minimalize: drop any element whose LM is divisible by another's LM
    polys.sort(key=lambda g: order.key(g.leading_exp(order)))
    minimal: list[MPoly] = []
    for g in polys:
        lm = g.leading_exp(order)
        if not any(_exp_divides(h.leading_exp(order), lm) for h in minimal):
            minimal.append(g)
    # auto-reduce tails
    reduced = list(minimal)
    changed = True
    while changed:
        changed = False
        for idx in range(len(reduced)):
            others = reduced[:idx] + reduced[idx + 1:]
            nf = poly_reduce(reduced[idx], others, order)
            if nf.is_zero():
                del reduced[idx]
                changed = True
                break
            nf = nf.monic(order)
            if nf != reduced[idx]:
                reduced[idx] = nf
                changed = True
    reduced.sort(key=lambda g: order.key(g.leading_exp(order)), reverse=True)
    return reduced


class Ideal:
    """Generators plus a cached reduced Groebner basis per order."""

    __slots__ = ("ring", "generators", "_gb")

    def __init__(self, ring: PolyRing, generators):
        self.ring = ring
        self.generators = list(generators)
        for g in self.generators:
            if g.ring is not ring:
                raise SpecMismatch("generator from another ring")
        self._gb: dict[MonomialOrder, list[MPoly]] = {}

    def groebner(self, order: MonomialOrder = GREVLEX,
                 spair_cap: int = DEFAULT_SPAIR_CAP) -> list[MPoly]:
        gb = self._gb.get(order)
        if gb is None:
            gb = groebner_basis(self.generators, order, spair_cap)
            self._gb[order] = gb
        return gb

    def reduce(self, f: MPoly, order: MonomialOrder = GREVLEX) -> MPoly:
        return poly_reduce(f, self.groebner(order), order)

    def contains(self, f: MPoly, order: MonomialOrder = GREVLEX) -> bool:
        return self.reduce(f, order).is_zero()

    def __repr__(self):
        inner = ", ".join(render_poly(g) for g in self.generators[:4])
        if len(self.generators) > 4:
            inner += ", ..."
        return f"Ideal<{inner}>"


SATURATION_TAG = "_sat"


def saturate_and_eliminate(ideal: Ideal, f: MPoly | None, keep,
                           spair_cap: int = DEFAULT_SPAIR_CAP) -> Ideal:
    """(I : f^infty) intersected with GF(q)[keep].

    Returns an Ideal in the ring on exactly the kept variables (original
    declaration order preserved), generated by its reduced Groebner basis.
    Saturation uses a tag variable z with generator z*f - 1; elimination is
    a block order with the dropped variables and z in the leading block.
    Pass f=None to skip saturation.
    """
    ring = ideal.ring
    keep = list(keep)
    for name in keep:
        if name not in ring.names:
            raise ValueError(f"unknown variable {name!r}")
    drop = [n for n in ring.names if n not in keep]
    kept = [n for n in ring.names if n in keep]
    use_tag = f is not None and not f.is_constant()
    big_names = tuple(drop) + ((SATURATION_TAG,) if use_tag else ()) + tuple(kept)
    big = PolyRing.get(ring.spec, big_names)
    var_map = [big_names.index(n) for n in ring.names]
    gens = [g.map_ring(big, var_map) for g in ideal.generators]
    if use_tag:
        tag = big.var(len(drop))
        gens.append(tag * f.map_ring(big, var_map) - big.one)
    split = len(drop) + (1 if use_tag else 0)
    order = MonomialOrder.block(split) if split else GREVLEX
    gb = groebner_basis(gens, order, spair_cap)
    small = PolyRing.get(ring.spec, tuple(kept))
    out = []
    for g in gb:
        if all(all(e[i] == 0 for i in range(split)) for e in g.terms):
            proj = {tuple(e[split:]) for e in g.terms}
            out.append(MPoly(small, {tuple(e[split:]): c for e, c in g.terms.items()}))
            assert len(out[-1].terms) == len(g.terms), "projection collision"
    # the elimination GB restricted to the kept block is already reduced and
    # sorted for the restricted (grevlex) order
    return Ideal(small, out)


# -- exact division and gcd ----------------------------------------------


def exact_div(f: MPoly, g: MPoly) -> MPoly:
    """Quotient f/g when g divides f exactly; raises DivisionByZero on g = 0
    and ValueError if the division leaves a remainder."""
    if g.is_zero():
        raise DivisionByZero("polynomial division by zero")
    if f.is_zero():
        return f
    ring = f.ring
    order = GREVLEX
    le = g.leading_exp(order)
    lc = g.terms[le]
    out: dict = {}
    work = dict(f.terms)
    heap = _MonomialHeap(order, work)
    while heap:
        e = heap.pop()
        c = work.pop(e, None)
        if c is None:
            continue
        if not _exp_divides(le, e):
            raise ValueError("inexact polynomial division")
        shift = _exp_sub(e, le)
        factor = c / lc
        out[shift] = factor
        for ge, gc in g.terms.items():
            if ge == le:
                continue
            te = _exp_add(ge, shift)
            tc = gc * factor
            cur = work.get(te)
            if cur is None:
                work[te] = -tc
                heap.push(te)
            else:
                s = cur - tc
                if s.is_zero():
                    del work[te]
                else:
                    work[te] = s
    return MPoly(ring, out)


def _as_univariate(f: MPoly, i: int) -> dict[int, MPoly]:
    """View f as a univariate polynomial in variable i whose coefficients
    live in the same ring (with variable i unused)."""
    coeffs: dict[int, dict] = {}
    for e, c in f.terms.items():
        d = e[i]
        e2 = list(e)
        e2[i] = 0
        coeffs.setdefault(d, {})[tuple(e2)] = c
    return {d: MPoly(f.ring, t) for d, t in coeffs.items()}


def _from_univariate(ring: PolyRing, i: int, coeffs: dict[int, MPoly]) -> MPoly:
    out: dict = {}
    for d, poly in coeffs.items():
        for e, c in poly.terms.items():
            e2 = list(e)
            e2[i] = d
            out[tuple(e2)] = c
    return MPoly(ring, out)


def mpoly_gcd(f: MPoly, g: MPoly) -> MPoly:
    """Greatest common divisor, normalized monic under grevlex.  Primitive
    pseudo-remainder sequences, recursing on the number of used variables."""
    if f.ring is not g.ring:
        raise SpecMismatch("gcd of polynomials from different rings")
    if f.is_zero():
        return g.monic(GREVLEX)
    if g.is_zero():
        return f.monic(GREVLEX)
    used = f.variables_used() | g.variables_used()
    if not used:
        return f.ring.one
    return _gcd_recursive(f, g, sorted(used)).monic(GREVLEX)


def _content(coeffs: dict[int, MPoly], used_rest) -> MPoly:
    it = iter(sorted(coeffs))
    first = coeffs[next(it)]
    acc = first
    for d in it:
        acc = _gcd_dispatch(acc, coeffs[d], used_rest)
        if acc.is_constant():
            break
    return acc.monic(GREVLEX)


def _gcd_dispatch(f: MPoly, g: MPoly, used_hint) -> MPoly:
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    used = f.variables_used() | g.variables_used()
    if not used:
        return f.ring.one
    return _gcd_recursive(f, g, sorted(used))


def _gcd_recursive(f: MPoly, g: MPoly, used: list[int]) -> MPoly:
    ring = f.ring
    v = used[0]
    rest = used[1:]
    fu = _as_univariate(f, v)
    gu = _as_univariate(g, v)
    if max(fu) == 0 and max(gu) == 0:
        # variable v does not actually occur; recurse directly
        return _gcd_dispatch(f, g, rest)
    cf = _content(fu, rest)
    cg = _content(gu, rest)
    cont = _gcd_dispatch(cf, cg, rest)
    fp = {d: exact_div(c, cf) for d, c in fu.items()}
    gp = {d: exact_div(c, cg) for d, c in gu.items()}
    # primitive PRS on the primitive parts
    a, b = (fp, gp) if max(fu) >= max(gu) else (gp, fp)
    while True:
        if not b:
            gcd_pp = a
            break
        r = _pseudo_rem(a, b, ring)
        if not r:
            gcd_pp = b
            break
        rc = _content(r, rest)
        r = {d: exact_div(c, rc) for d, c in r.items()}
        a, b = b, r
    result = _from_univariate(ring, v, gcd_pp)
    return cont * result


def _pseudo_rem(a: dict[int, MPoly], b: dict[int, MPoly], ring: PolyRing):
    """Pseudo-remainder of univariate-with-polynomial-coefficient views."""
    da, db = max(a), max(b)
    if da < db:
        return dict(a)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shift = dr - db
        new: dict[int, MPoly] = {}
        for d, c in r.items():
            new[d] = c * lb
        for d, c in b.items():
            cur = new.get(d + shift, ring.zero)
            cur = cur - c * lr
            new[d + shift] = cur
        r = {d: c for d, c in new.items() if not c.is_zero()}
    return r


# -- p-th power decomposition ---------------------------------------------


def p_power_decompose(u: MPoly) -> dict[tuple[int, ...], MPoly]:
    """Write u = sum_I x^I * (u_I)^p over the ring's variables, I ranging
    over exponent vectors with entries < p.  Returns {I: u_I} with zero
    components omitted.  Exact and unique."""
    ring = u.ring
    p = ring.spec.p
    groups: dict[tuple[int, ...], dict] = {}
    for e, c in u.terms.items():
        residue = tuple(d % p for d in e)
        quotient = tuple(d // p for d in e)
        groups.setdefault(residue, {})[quotient] = c.frobenius_inv()
    return {i: MPoly(ring, t) for i, t in sorted(groups.items())}
