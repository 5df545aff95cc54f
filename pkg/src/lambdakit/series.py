"""Truncated power series over GF(q) with exact valuation bookkeeping.

A TruncSeries is an element of GF(q)[[t]] known modulo t^prec; its valuation
is exact, with val == prec encoding "congruent to 0 mod t^prec".  Arithmetic
tracks precision: sums keep the minimum precision, products gain the partner's
valuation.  Division requires the divisor's valuation to be at most the
dividend's (the quotient stays a power series).
"""

from __future__ import annotations

import random

from .errors import DenominatorVanishes, DivisionByZero, SpecMismatch
from .gf import FieldSpec, FqElem


class TruncSeries:
    __slots__ = ("spec", "prec", "coeffs", "val")

    def __init__(self, spec: FieldSpec, prec: int, coeffs):
        if prec < 1:
            raise ValueError("precision must be at least 1")
        cs = list(coeffs)[:prec]
        cs += [spec.zero] * (prec - len(cs))
        val = prec
        for i, c in enumerate(cs):
            if not c.is_zero():
                val = i
                break
        for i in range(val):
            cs[i] = spec.zero
        self.spec = spec
        self.prec = prec
        self.coeffs = tuple(cs)
        self.val = val

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(spec: FieldSpec, prec: int) -> "TruncSeries":
        return TruncSeries(spec, prec, [])

    @staticmethod
    def constant(spec: FieldSpec, c: FqElem, prec: int) -> "TruncSeries":
        return TruncSeries(spec, prec, [c])

    @staticmethod
    def variable(spec: FieldSpec, prec: int) -> "TruncSeries":
        return TruncSeries(spec, prec, [spec.zero, spec.one])

    @staticmethod
    def from_ints(spec: FieldSpec, prec: int, ints) -> "TruncSeries":
        return TruncSeries(spec, prec, [FqElem(spec, v % spec.p) if spec.m == 1
                                        else spec.elem(v) for v in ints])

    @staticmethod
    def random_perturbation(spec: FieldSpec, prec: int, rng: random.Random,
                            min_val: int = 1) -> "TruncSeries":
        cs = [spec.zero] * min_val
        cs += [FqElem(spec, rng.randrange(spec.q)) for _ in range(prec - min_val)]
        return TruncSeries(spec, prec, cs)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            raise TypeError(f"cannot combine TruncSeries with {type(other).__name__}")
        if other.spec is not self.spec:
            raise SpecMismatch("mixed field specs in series arithmetic")

    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        return TruncSeries(self.spec, prec,
                           [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return TruncSeries(self.spec, self.prec, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        prec = min(self.prec + other.val, other.prec + self.val)
        spec = self.spec
        out = [spec.zero] * prec
        for i in range(self.val, min(self.prec, prec)):
            a = self.coeffs[i]
            if a.is_zero():
                continue
            jmax = min(other.prec, prec - i)
            for j in range(other.val, jmax):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TruncSeries(spec, prec, out)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative series power; divide instead")
        result = TruncSeries.constant(self.spec, self.spec.one, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, k: int) -> "TruncSeries":
        """Multiply by t^k (k >= 0) or exactly divide by t^-k (requires
        val >= -k)."""
        if k >= 0:
            return TruncSeries(self.spec, self.prec + k,
                               [self.spec.zero] * k + list(self.coeffs))
        k = -k
        if self.val < k:
            raise DivisionByZero("series shift below valuation")
        return TruncSeries(self.spec, self.prec - k, self.coeffs[k:])

    def inverse(self) -> "TruncSeries":
        """Inverse of a unit (val == 0) series, to the same precision."""
        if self.val != 0:
            raise DivisionByZero("series inverse requires valuation 0")
        spec = self.spec
        c0inv = self.coeffs[0].inv()
        out = [spec.zero] * self.prec
        out[0] = c0inv
        for k in range(1, self.prec):
            acc = spec.zero
            for j in range(1, k + 1):
                if j < self.prec and not self.coeffs[j].is_zero():
                    acc = acc + self.coeffs[j] * out[k - j]
            out[k] = -c0inv * acc
        return TruncSeries(spec, self.prec, out)

    def __truediv__(self, other):
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("series division by (indistinguishable from) zero")
        if self.val < other.val:
            raise DivisionByZero("quotient would have negative valuation")
        num = self.shift(-other.val)
        den = other.shift(-other.val)
        return num * den.inverse()

    def truncate(self, prec: int) -> "TruncSeries":
        if prec >= self.prec:
            return self
        return TruncSeries(self.spec, prec, self.coeffs[:prec])

    def is_zero(self) -> bool:
        """Indistinguishable from zero at this precision."""
        return self.val >= self.prec

    def __eq__(self, other):
        """Equality of the known coefficient windows (same precision)."""
        return (isinstance(other, TruncSeries) and other.spec is self.spec
                and other.prec == self.prec and other.coeffs == self.coeffs)

    def __hash__(self):
        return hash((self.spec.p, self.spec.m, self.prec, self.coeffs))

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            cstr = str(c)
            if " " in cstr:
                cstr = f"({cstr})"
            if i == 0:
                parts.append(cstr)
            elif i == 1:
                parts.append("t" if cstr == "1" else f"{cstr}*t")
            else:
                parts.append(f"t^{i}" if cstr == "1" else f"{cstr}*t^{i}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"<{self} + O(t^{self.prec})>"


def series_linear_solve(rows: list[list[TruncSeries]], rhs: list[TruncSeries]):
    """Solve M x = v over truncated series by Gaussian elimination with
    minimum-valuation pivoting.  Returns (solution, det_val).  Raises
    DivisionByZero via the pivot division when the matrix is not a unit."""
    n = len(rows)
    mat = [list(r) + [b] for r, b in zip(rows, rhs)]
    det_val = 0
    for col in range(n):
        piv = min(range(col, n), key=lambda i: mat[i][col].val)
        if mat[piv][col].is_zero():
            raise DivisionByZero("series matrix is singular at working precision")
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
        det_val += mat[col][col].val
        for i in range(n):
            if i == col:
                continue
            if mat[i][col].val >= mat[i][col].prec:
                continue
            factor = mat[i][col] / mat[col][col]
            for j in range(col, n + 1):
                mat[i][j] = mat[i][j] - factor * mat[col][j]
    sol = [mat[i][n] / mat[i][i] for i in range(n)]
    return sol, det_val


def embed_ratfunc(x, center: FqElem, prec: int) -> TruncSeries:
    """t-adic expansion of a univariate rational function at t = center + t.
    Raises DenominatorVanishes when the denominator vanishes at the center."""
    amb = x.ambient
    if amb.n != 1:
        raise ValueError("series embedding requires a univariate ambient field")
    spec = amb.spec
    shifted = TruncSeries(spec, prec, [center, spec.one])
    num = x.num.evaluate([shifted], coeff_map=lambda c: TruncSeries.constant(spec, c, prec),
                         zero=TruncSeries.zero(spec, prec))
    den = x.den.evaluate([shifted], coeff_map=lambda c: TruncSeries.constant(spec, c, prec),
                         zero=TruncSeries.zero(spec, prec))
    if den.val != 0:
        raise DenominatorVanishes(f"denominator of {x} vanishes at center {center}")
    return num / den
