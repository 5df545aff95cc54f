"""The ambient rational function field K = GF(q)(t1,...,tn).

RatFunc values are normalized on construction (gcd 1, denominator monic in
grevlex), so equality and hashing are structural.  The module also provides
the coordinate decomposition of K over K^(p) along the canonical p-basis
(t1,...,tn), p-th roots, and an exact fraction-free linear solver.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from .errors import DivisionByZero, SpecMismatch
from .gf import FieldSpec, FqElem
from .poly import (GREVLEX, MPoly, PolyRing, exact_div, mpoly_gcd,
                   p_power_decompose, render_poly)

_AMBIENT_CACHE: dict[tuple, "AmbientField"] = {}


class AmbientField:
    """K = GF(q)(t1..tn) with canonical p-basis (t1,...,tn); interned."""

    __slots__ = ("spec", "ring", "n", "zero", "one")

    @staticmethod
    def get(spec: FieldSpec, names) -> "AmbientField":
        key = (spec.p, spec.m, tuple(names))
        amb = _AMBIENT_CACHE.get(key)
        if amb is None:
            amb = AmbientField(spec, tuple(names))
            _AMBIENT_CACHE[key] = amb
        return amb

    def __init__(self, spec: FieldSpec, names: tuple[str, ...]):
        self.spec = spec
        self.ring = PolyRing.get(spec, names)
        self.n = len(names)
        self.zero = RatFunc(self, self.ring.zero, self.ring.one, _normalized=True)
        self.one = RatFunc(self, self.ring.one, self.ring.one, _normalized=True)

    def rat(self, num: MPoly, den: MPoly | None = None) -> "RatFunc":
        return RatFunc(self, num, self.ring.one if den is None else den)

    def const(self, c: FqElem) -> "RatFunc":
        return self.rat(self.ring.const(c))

    def int_const(self, k: int) -> "RatFunc":
        return self.rat(self.ring.int_const(k))

    def var(self, i: int) -> "RatFunc":
        return self.rat(self.ring.var(i))

    def gens(self) -> tuple["RatFunc", ...]:
        return tuple(self.var(i) for i in range(self.n))

    def t_monomial(self, index: tuple[int, ...]) -> "RatFunc":
        return self.rat(self.ring.monomial(index))

    def multi_indices(self, length: int | None = None):
        """All multi-indices with entries in [0, p), lexicographic order
        (leftmost position most significant)."""
        k = self.n if length is None else length
        return itertools.product(range(self.spec.p), repeat=k)

    def __repr__(self):
        return f"{self.spec!r}({', '.join(self.ring.names)})"

    def __reduce__(self):
        return (AmbientField.get, (self.spec, self.ring.names))


class RatFunc:
    """A normalized element num/den of the ambient field."""

    __slots__ = ("ambient", "num", "den", "_hash")

    def __init__(self, ambient: AmbientField, num: MPoly, den: MPoly,
                 _normalized: bool = False):
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        self.ambient = ambient
        if not _normalized:
            if num.is_zero():
                num, den = ambient.ring.zero, ambient.ring.one
            else:
                g = mpoly_gcd(num, den)
                if not (g.is_constant() and g.constant_value() == ambient.spec.one):
                    num = exact_div(num, g)
                    den = exact_div(den, g)
                lc = den.leading_coeff(GREVLEX)
                if lc != ambient.spec.one:
                    inv = lc.inv()
                    num = num.scale(inv)
                    den = den.scale(inv)
        self.num = num
        self.den = den
        self._hash = None

    # -- arithmetic -------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, RatFunc):
            raise TypeError(f"cannot combine RatFunc with {type(other).__name__}")
        if other.ambient is not self.ambient:
            raise SpecMismatch("mixed ambient fields")

    def __add__(self, other):
        self._check(other)
        return RatFunc(self.ambient,
                       self.num * other.den + other.num * self.den,
                       self.den * other.den)

    def __neg__(self):
        return RatFunc(self.ambient, -self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        return RatFunc(self.ambient, self.num * other.num, self.den * other.den)

    def inv(self) -> "RatFunc":
        if self.is_zero():
            raise DivisionByZero("inverse of zero rational function")
        return RatFunc(self.ambient, self.den, self.num)

    def __truediv__(self, other):
        self._check(other)
        if other.is_zero():
            raise DivisionByZero("division by zero rational function")
        return RatFunc(self.ambient, self.num * other.den, self.den * other.num)

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        return RatFunc(self.ambient, self.num ** k, self.den ** k)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self == self.ambient.one

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    # -- plumbing ----------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, RatFunc) and other.ambient is self.ambient
                and other.num == self.num and other.den == self.den)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((hash(self.num), hash(self.den)))
            self._hash = h
        return h

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        return render_ratfunc(self)

    def __repr__(self):
        return f"<{render_ratfunc(self)}>"


def _is_single_factor(f: MPoly) -> bool:
    """True when the canonical rendering of f is a single power atom, i.e.
    one term that is a bare constant, a variable, or a variable power."""
    if len(f.terms) != 1:
        return False
    (e, c), = f.terms.items()
    nz = [d for d in e if d]
    if not nz:
        return True
    return len(nz) == 1 and c == f.ring.spec.one


def render_ratfunc(x: RatFunc) -> str:
    """Canonical rendering; parses back to the same value."""
    num_str = render_poly(x.num)
    if x.den == x.ambient.ring.one:
        return num_str
    den_str = render_poly(x.den)
    if not _is_single_factor(x.den):
        den_str = f"({den_str})"
    if len(x.num.terms) > 1 or not _is_single_factor(x.num):
        num_str = f"({num_str})"
    return f"{num_str}/{den_str}"


def rat_arith(op: str, x: RatFunc, y: RatFunc | None = None) -> RatFunc:
    """Dispatch-style entry point: op in {add, sub, mul, div, inv}."""
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
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


# -- coordinates over K^(p) ----------------------------------------------


@functools.lru_cache(maxsize=65536)
def p_coordinates(x: RatFunc) -> dict[tuple[int, ...], RatFunc]:
    """The unique family with x = sum_I t^I * coords[I]^p, I over all
    multi-indices of length n with entries < p.  Every index is present."""
    amb = x.ambient
    coords = {idx: amb.zero for idx in amb.multi_indices()}
    if not x.is_zero():
        g = x.den
        u = x.num * g ** (amb.spec.p - 1)
        for idx, piece in p_power_decompose(u).items():
            coords[idx] = RatFunc(amb, piece, g)
    return coords


def reconstruct_from_p_coordinates(amb: AmbientField,
                                   coords: dict[tuple[int, ...], RatFunc]) -> RatFunc:
    p = amb.spec.p
    total = amb.zero
    for idx, val in coords.items():
        total = total + amb.t_monomial(idx) * val ** p
    return total


def pth_root(x: RatFunc) -> RatFunc | None:
    """The y with y^p = x when x is a p-th power in K; None otherwise."""
    coords = p_coordinates(x)
    zero_idx = (0,) * x.ambient.n
    for idx, val in coords.items():
        if idx != zero_idx and not val.is_zero():
            return None
    return coords[zero_idx]


# -- exact linear algebra ------------------------------------------------


@dataclass(frozen=True)
class LinearSolveResult:
    """Outcome of an exact linear solve.

    status: 'unique', 'underdetermined', or 'inconsistent'.
    solution: a solution vector for the two consistent statuses (free
    variables set to zero), None otherwise.
    kernel: basis of the solution space of the homogeneous system, nonempty
    exactly when status == 'underdetermined'.
    """
    status: str
    solution: list | None
    kernel: list


def linear_solve(rows: list[list[RatFunc]], rhs: list[RatFunc]) -> LinearSolveResult:
    """Solve M x = v exactly by fraction-free (Bareiss) elimination after
    clearing and content-stripping each row."""
    nrows = len(rows)
    if nrows != len(rhs):
        raise ValueError("matrix/vector size mismatch")
    if nrows == 0:
        return LinearSolveResult("underdetermined", [], [])
    amb = rhs[0].ambient
    ncols = len(rows[0])
    for row in rows:
        if len(row) != ncols:
            raise ValueError("ragged matrix")

    # clear denominators row by row, then strip polynomial content
    mat: list[list[MPoly]] = []
    for row, b in zip(rows, rhs):
        entries = list(row) + [b]
        lcm = amb.ring.one
        for x in entries:
            g = mpoly_gcd(lcm, x.den)
            lcm = exact_div(lcm * x.den, g)
        cleared = [x.num * exact_div(lcm, x.den) for x in entries]
        content = amb.ring.zero
        for f in cleared:
            content = mpoly_gcd(content, f)
            if content.is_constant() and not content.is_zero():
                break
        if not content.is_zero() and not content.is_constant():
            cleared = [exact_div(f, content) for f in cleared]
        mat.append(cleared)

    # Bareiss forward elimination with deterministic pivoting
    prev = amb.ring.one
    pivot_rows: list[int] = []
    pivot_cols: list[int] = []
    r = 0
    for col in range(ncols):
        best = None
        for i in range(r, nrows):
            f = mat[i][col]
            if f.is_zero():
                continue
            score = (f.total_degree(), len(f.terms), i)
            if best is None or score < best[0]:
                best = (score, i)
        if best is None:
            continue
        i = best[1]
        if i != r:
            mat[r], mat[i] = mat[i], mat[r]
        pivot = mat[r][col]
        for i in range(r + 1, nrows):
            head = mat[i][col]
            for j in range(col + 1, ncols + 1):
                mat[i][j] = exact_div(pivot * mat[i][j] - head * mat[r][j], prev)
            mat[i][col] = amb.ring.zero
        prev = pivot
        pivot_rows.append(r)
        pivot_cols.append(col)
        r += 1

    # consistency: all-zero coefficient rows must have zero rhs
    for i in range(r, nrows):
        if not mat[i][ncols].is_zero():
            return LinearSolveResult("inconsistent", None, [])

    free_cols = [c for c in range(ncols) if c not in pivot_cols]

    def back_substitute(assign: dict[int, RatFunc]) -> list[RatFunc]:
        sol: list[RatFunc] = [amb.zero] * ncols
        for c, v in assign.items():
            sol[c] = v
        for k in range(len(pivot_cols) - 1, -1, -1):
            row_i = pivot_rows[k]
            col = pivot_cols[k]
            acc = RatFunc(amb, mat[row_i][ncols], amb.ring.one)
            for j in range(col + 1, ncols):
                f = mat[row_i][j]
                if not f.is_zero():
                    acc = acc - RatFunc(amb, f, amb.ring.one) * sol[j]
            sol[col] = acc / RatFunc(amb, mat[row_i][col], amb.ring.one)
        return sol

    particular = back_substitute({c: amb.zero for c in free_cols})
    if not free_cols:
        return LinearSolveResult("unique", particular, [])

    kernel = []
    zero_rhs_backup = [mat[pivot_rows[k]][ncols] for k in range(len(pivot_cols))]
    for k in range(len(pivot_cols)):
        mat[pivot_rows[k]][ncols] = amb.ring.zero
    for free in free_cols:
        assign = {c: (amb.one if c == free else amb.zero) for c in free_cols}
        kernel.append(back_substitute(assign))
    for k in range(len(pivot_cols)):
        mat[pivot_rows[k]][ncols] = zero_rhs_backup[k]
    return LinearSolveResult("underdetermined", particular, kernel)
