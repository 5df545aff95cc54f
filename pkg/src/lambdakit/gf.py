"""Exact arithmetic in GF(q), q = p^m, with Frobenius and its inverse.

Elements are immutable and hashable; a FieldSpec is interned per (p, m) so
identity comparison of specs is meaningful.  Extension fields use a fixed
modulus table (lexicographically smallest monic irreducible), which makes
every representation canonical and reproducible.
"""

from __future__ import annotations

from .errors import DivisionByZero, SpecMismatch

# Non-leading coefficients (ascending) of the lexicographically smallest monic
# irreducible polynomial of degree m over F_p.  Leading coefficient is 1.
_MODULUS_TABLE = {
    (2, 2): (1, 1),
    (2, 3): (1, 0, 1),
    (2, 4): (1, 0, 0, 1),
    (3, 2): (1, 0),
    (3, 3): (1, 0, 2),
    (3, 4): (1, 0, 1, 1),
    (5, 2): (1, 1),
    (5, 3): (1, 0, 1),
    (5, 4): (1, 0, 1, 1),
    (7, 2): (1, 0),
    (7, 3): (1, 0, 1),
    (7, 4): (1, 0, 0, 1),
}

_MAX_PRIME = 2**31 - 1


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


_SPEC_CACHE: dict[tuple[int, int], "FieldSpec"] = {}


class FieldSpec:
    """The field GF(p^m).  Use FieldSpec.get(p, m); instances are interned."""

    __slots__ = ("p", "m", "q", "modulus", "_exp", "_log", "zero", "one", "gen")

    @staticmethod
    def get(p: int, m: int = 1) -> "FieldSpec":
        key = (p, m)
        spec = _SPEC_CACHE.get(key)
        if spec is None:
            spec = FieldSpec(p, m)
            _SPEC_CACHE[key] = spec
        return spec

    def __init__(self, p: int, m: int = 1):
        if not (2 <= p <= _MAX_PRIME) or not _is_prime(p):
            raise ValueError(f"characteristic must be a prime in [2, 2^31-1], got {p}")
        if m < 1:
            raise ValueError(f"extension degree must be >= 1, got {m}")
        if m > 1 and (p, m) not in _MODULUS_TABLE:
            raise ValueError(
                f"no modulus table entry for GF({p}^{m}); "
                f"extension degrees 2..4 are supported for p in {{2,3,5,7}}")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = _MODULUS_TABLE.get((p, m), ())
        self._exp = None
        self._log = None
        if m > 1:
            self._build_tables()
        self.zero = FqElem(self, 0)
        self.one = FqElem(self, 1)
        # generator of the polynomial representation (the class of x); only
        # meaningful for m > 1
        self.gen = FqElem(self, p) if m > 1 else self.one

    # -- internal polynomial representation: an element is an integer whose
    #    base-p digits are the coefficients (ascending powers of the generator)

    def _mul_raw(self, a: int, b: int) -> int:
        p, m = self.p, self.m
        da = []
        while a:
            da.append(a % p)
            a //= p
        prod = [0] * (len(da) + m)
        while b:
            d = b % p
            b //= p
            if d:
                for i, c in enumerate(da):
                    prod[i] = (prod[i] + d * c) % p
            da = [0] + da  # shift for next digit of b
            if len(da) > len(prod):
                prod.append(0)
        # reduce by modulus
        mod = list(self.modulus) + [1]
        for i in range(len(prod) - 1, m - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(m):
                    prod[i - m + j] = (prod[i - m + j] - c * mod[j]) % p
        val = 0
        for c in reversed(prod[:m]):
            val = val * p + c
        return val

    def _build_tables(self):
        q = self.q
        # find a multiplicative generator by trial
        for cand in range(2, q):
            seen = 1
            x = cand
            order = 1
            while x != 1:
                x = self._mul_raw(x, cand)
                order += 1
                if order > q:
                    raise AssertionError("modulus not irreducible")
            if order == q - 1:
                g = cand
                break
        else:
            raise AssertionError("no multiplicative generator found")
        exp = [1] * (q - 1)
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._mul_raw(x, g)
        self._exp = exp
        self._log = log

    def elem(self, value: int) -> "FqElem":
        """Element from an integer: value mod p for m = 1, else the base-p
        digit vector of value (must be < q)."""
        if self.m == 1:
            return FqElem(self, value % self.p)
        if not (0 <= value < self.q):
            raise ValueError(f"value {value} out of range for GF({self.p}^{self.m})")
        return FqElem(self, value)

    def from_coeffs(self, coeffs) -> "FqElem":
        """Element from coefficients (ascending powers of the generator)."""
        if len(coeffs) > self.m:
            raise ValueError("too many coefficients")
        val = 0
        for c in reversed(list(coeffs)):
            val = val * self.p + (c % self.p)
        return FqElem(self, val)

    def elements(self):
        """All field elements, in canonical integer order."""
        return [FqElem(self, v) for v in range(self.q)]

    def __repr__(self):
        return f"GF({self.p})" if self.m == 1 else f"GF({self.p}^{self.m})"

    def __reduce__(self):
        return (FieldSpec.get, (self.p, self.m))


class FqElem:
    """An element of GF(p^m), stored as an integer encoding its coefficient
    vector.  Arithmetic is exact; all operations return new elements."""

    __slots__ = ("spec", "val")

    def __init__(self, spec: FieldSpec, val: int):
        self.spec = spec
        self.val = val

    def coeffs(self) -> tuple[int, ...]:
        p, m = self.spec.p, self.spec.m
        v = self.val
        out = []
        for _ in range(m):
            out.append(v % p)
            v //= p
        return tuple(out)

    def _check(self, other):
        if not isinstance(other, FqElem):
            raise TypeError(f"cannot combine FqElem with {type(other).__name__}")
        if other.spec is not self.spec:
            raise SpecMismatch(f"mixed field specs {self.spec} and {other.spec}")

    def __add__(self, other):
        self._check(other)
        spec = self.spec
        if spec.m == 1:
            return FqElem(spec, (self.val + other.val) % spec.p)
        p = spec.p
        a, b, v, mult = self.val, other.val, 0, 1
        while a or b:
            v += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return FqElem(spec, v)

    def __sub__(self, other):
        self._check(other)
        return self + (-other)

    def __neg__(self):
        spec = self.spec
        if spec.m == 1:
            return FqElem(spec, (-self.val) % spec.p)
        p = spec.p
        a, v, mult = self.val, 0, 1
        while a:
            v += ((-a) % p) * mult
            a //= p
            mult *= p
        return FqElem(spec, v)

    def __mul__(self, other):
        self._check(other)
        spec = self.spec
        if spec.m == 1:
            return FqElem(spec, (self.val * other.val) % spec.p)
        if self.val == 0 or other.val == 0:
            return spec.zero
        e = spec._log[self.val] + spec._log[other.val]
        return FqElem(spec, spec._exp[e % (spec.q - 1)])

    def inv(self) -> "FqElem":
        spec = self.spec
        if self.val == 0:
            raise DivisionByZero(f"inverse of zero in {spec}")
        if spec.m == 1:
            return FqElem(spec, pow(self.val, spec.p - 2, spec.p))
        e = (-spec._log[self.val]) % (spec.q - 1)
        return FqElem(spec, spec._exp[e])

    def __truediv__(self, other):
        self._check(other)
        return self * other.inv()

    def __pow__(self, n: int):
        spec = self.spec
        if n < 0:
            return self.inv() ** (-n)
        if self.val == 0:
            return spec.one if n == 0 else spec.zero
        if spec.m == 1:
            return FqElem(spec, pow(self.val, n, spec.p))
        e = (spec._log[self.val] * n) % (spec.q - 1)
        return FqElem(spec, spec._exp[e])

    def frobenius(self) -> "FqElem":
        return self ** self.spec.p

    def frobenius_inv(self) -> "FqElem":
        """The unique y with y^p = self; equals self^(p^(m-1))."""
        spec = self.spec
        if spec.m == 1:
            return self
        return self ** (spec.p ** (spec.m - 1))

    def is_zero(self) -> bool:
        return self.val == 0

    def __eq__(self, other):
        return (isinstance(other, FqElem) and other.spec is self.spec
                and other.val == self.val)

    def __hash__(self):
        return hash((self.spec.p, self.spec.m, self.val))

    def __bool__(self):
        return self.val != 0

    def __str__(self):
        spec = self.spec
        if spec.m == 1:
            return str(self.val)
        parts = []
        for i, c in enumerate(self.coeffs()):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                head = "gen" if c == 1 else f"{c}*gen"
                parts.append(head if i == 1 else f"{head}^{i}")
        if not parts:
            return "0"
        return " + ".join(reversed(parts))

    def __repr__(self):
        return f"{self.spec!r}:{self}"


def fq_arith(op: str, x: FqElem, y: FqElem | None = None) -> FqElem:
    """Dispatch-style arithmetic entry point: op in {add, sub, mul, inv}."""
    if op == "inv":
        return x.inv()
    if y is None:
        raise TypeError(f"operation {op!r} needs two operands")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown operation {op!r}")
