"""p-independence and the parameterized lambda functions.

The coordinate system: every x in K = GF(q)(t1..tn) has unique canonical
coordinates x = sum_I t^I gamma_I(x)^p.  Membership of x in the span
K^(p)C(b) reduces to an exact K-linear system because K^(p)C(b) is the
K^(p)-linear span of the p-monomials u^J in the concatenation u of C's
generators and b (each generator's p-th power already lies in K^(p)).

lambda_eval solves the same system against a p-independent tuple b, where
the solution is unique and gives the lambda coordinates of Definition-style
a = sum_I b^I lambda_I(a)^p.

LambdaTerm is the closed term language over these functions with the
zero-extension convention: an application evaluates to 0 whenever its
characteristic tag is wrong, its parameter tuple is not p-independent, or
its argument is outside the p-span.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from .errors import NotInSpan, NotPIndependent, ResourceLimit, SpecMismatch
from .gf import FqElem
from .poly import DEFAULT_SPAIR_CAP
from .ratfunc import AmbientField, RatFunc, linear_solve, p_coordinates
from .subfield import SubfieldPresentation, member, prime_subfield

KTuple = tuple  # finite ordered tuples of RatFunc; concatenation is +


def multi_indices(p: int, length: int):
    """All multi-indices in p^[length], lexicographic, leftmost position most
    significant, entries ascending 0..p-1."""
    return itertools.product(range(p), repeat=length)


def p_monomial(u: KTuple, index: tuple[int, ...]) -> RatFunc:
    amb = u[0].ambient if u else None
    if amb is None:
        raise ValueError("p-monomial of the empty tuple needs an ambient; use amb.one")
    acc = amb.one
    for x, e in zip(u, index):
        if e:
            acc = acc * x ** e
    return acc


@functools.lru_cache(maxsize=8192)
def _span_matrix(amb: AmbientField, u: KTuple):
    """Rows: canonical multi-indices I of the ambient; columns: multi-indices
    J over u; entry gamma_I(u^J)."""
    p = amb.spec.p
    cols = list(multi_indices(p, len(u)))
    col_coords = []
    for J in cols:
        mono = amb.one
        for x, e in zip(u, J):
            if e:
                mono = mono * x ** e
        col_coords.append(p_coordinates(mono))
    row_idx = list(amb.multi_indices())
    rows = [[col_coords[j][I] for j in range(len(cols))] for I in row_idx]
    return cols, rows, row_idx


def _solve_span(x: RatFunc, u: KTuple):
    amb = x.ambient
    cols, rows, row_idx = _span_matrix(amb, u)
    xc = p_coordinates(x)
    rhs = [xc[I] for I in row_idx]
    return cols, linear_solve(rows, rhs)


def in_p_span(x: RatFunc, b: KTuple, C: SubfieldPresentation):
    """Decide x in K^(p)C(b).  Returns {J: d_J} with x = sum_J d_J^p u^J over
    the concatenation u = gens(C) + b (free coordinates zeroed), or None."""
    if x.ambient is not C.ambient:
        raise SpecMismatch("element and base subfield from different ambients")
    u = tuple(C.gens) + tuple(b)
    cols, result = _solve_span(x, u)
    if result.status == "inconsistent":
        return None
    return dict(zip(cols, result.solution))


def p_independent(b: KTuple, C: SubfieldPresentation | None = None) -> bool:
    """Is b p-independent over C (absolute when C is None or trivial)?"""
    if not b:
        return True
    if C is None:
        C = prime_subfield(b[0].ambient)
    for i in range(len(b)):
        rest = b[:i] + b[i + 1:]
        if in_p_span(b[i], rest, C) is not None:
            return False
    return True


def p_ind_prefix(b: KTuple, C: SubfieldPresentation) -> KTuple:
    """Left-greedy maximal p-independent subtuple: scan b keeping each element
    exactly when it is p-independent over C together with the kept prefix."""
    kept: list[RatFunc] = []
    for x in b:
        if in_p_span(x, tuple(kept), C) is None:
            kept.append(x)
    return tuple(kept)


def p_ind_prefix_with_flags(b: KTuple, C: SubfieldPresentation):
    """As p_ind_prefix, but also report per-element keep decisions."""
    kept: list[RatFunc] = []
    flags: list[bool] = []
    for x in b:
        keep = in_p_span(x, tuple(kept), C) is None
        flags.append(keep)
        if keep:
            kept.append(x)
    return tuple(kept), flags


def lambda_eval(a: RatFunc, b: KTuple, *, checked: bool = True
                ) -> dict[tuple[int, ...], RatFunc]:
    """The unique family with a = sum_I b^I lambda_I(a)^p, for b p-independent
    (absolute) and a in K^(p)(b).  All p^|b| indices are present."""
    amb = a.ambient
    if checked and not p_independent(b):
        raise NotPIndependent(f"tuple ({', '.join(map(str, b))}) is not p-independent")
    cols, result = _solve_span(a, tuple(b))
    if result.status == "inconsistent":
        raise NotInSpan(f"{a} is not in the p-span of ({', '.join(map(str, b))})")
    if result.status != "unique" and checked:
        raise NotPIndependent("p-monomials of the tuple are linearly dependent")
    return dict(zip(cols, result.solution))


def lambda_reconstruct(b: KTuple, lam: dict[tuple[int, ...], RatFunc],
                       amb: AmbientField) -> RatFunc:
    p = amb.spec.p
    total = amb.zero
    for J, val in lam.items():
        mono = amb.one
        for x, e in zip(b, J):
            if e:
                mono = mono * x ** e
        total = total + mono * val ** p
    return total


# -- the term language ------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: FqElem


@dataclass(frozen=True)
class Add:
    args: tuple


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    args: tuple


@dataclass(frozen=True)
class Inv:
    arg: object


@dataclass(frozen=True)
class Lam:
    """Application l_{p,I}(x, ys) of a parameterized lambda function symbol."""
    p: int
    index: tuple[int, ...]
    arg: object
    params: tuple

    def __post_init__(self):
        if len(self.index) != len(self.params):
            raise ValueError("multi-index length must match parameter arity")
        if any(not (0 <= i < self.p) for i in self.index):
            raise ValueError("multi-index entries must lie in [0, p)")


LambdaTerm = object  # Var | Const | Add | Sub | Mul | Inv | Lam


def lambda_term_eval(term, env: dict[str, RatFunc], amb: AmbientField) -> RatFunc:
    """Evaluate a term under the zero-extension semantics: a Lam node yields
    the lambda value when its p equals the ambient characteristic, its
    parameters are p-independent and its argument is in their p-span, and 0
    in every other case.  Division by zero inside Inv is an error."""
    if isinstance(term, Var):
        try:
            return env[term.name]
        except KeyError:
            raise KeyError(f"unbound term variable {term.name!r}") from None
    if isinstance(term, Const):
        return amb.const(term.value)
    if isinstance(term, Add):
        acc = amb.zero
        for t in term.args:
            acc = acc + lambda_term_eval(t, env, amb)
        return acc
    if isinstance(term, Sub):
        return (lambda_term_eval(term.left, env, amb)
                - lambda_term_eval(term.right, env, amb))
    if isinstance(term, Mul):
        acc = amb.one
        for t in term.args:
            acc = acc * lambda_term_eval(t, env, amb)
        return acc
    if isinstance(term, Inv):
        return lambda_term_eval(term.arg, env, amb).inv()
    if isinstance(term, Lam):
        if term.p != amb.spec.p:
            return amb.zero
        ys = tuple(lambda_term_eval(t, env, amb) for t in term.params)
        if not p_independent(ys):
            return amb.zero
        x = lambda_term_eval(term.arg, env, amb)
        cols, result = _solve_span(x, ys)
        if result.status == "inconsistent":
            return amb.zero
        return dict(zip(cols, result.solution))[term.index]
    raise TypeError(f"not a lambda term: {term!r}")


def term_to_sexpr(term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Const):
        return f"#{term.value.val}"
    if isinstance(term, Add):
        return "(+ " + " ".join(term_to_sexpr(t) for t in term.args) + ")"
    if isinstance(term, Sub):
        return f"(- {term_to_sexpr(term.left)} {term_to_sexpr(term.right)})"
    if isinstance(term, Mul):
        return "(* " + " ".join(term_to_sexpr(t) for t in term.args) + ")"
    if isinstance(term, Inv):
        return f"(inv {term_to_sexpr(term.arg)})"
    if isinstance(term, Lam):
        idx = " ".join(str(i) for i in term.index)
        ys = " ".join(term_to_sexpr(t) for t in term.params)
        return f"(l {term.p} ({idx}) {term_to_sexpr(term.arg)} ({ys}))"
    raise TypeError(f"not a lambda term: {term!r}")


def term_from_sexpr(src: str, spec) -> object:
    """Parse the serialization produced by term_to_sexpr."""
    tokens = src.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            if tok.startswith("#"):
                return Const(FqElem(spec, int(tok[1:])))
            return Var(tok)
        head = tokens[pos]
        pos += 1
        if head == "+":
            args = _parse_until_close()
            return Add(tuple(args))
        if head == "*":
            args = _parse_until_close()
            return Mul(tuple(args))
        if head == "-":
            left = parse()
            right = parse()
            _expect_close()
            return Sub(left, right)
        if head == "inv":
            arg = parse()
            _expect_close()
            return Inv(arg)
        if head == "l":
            p = int(tokens[pos]); pos_advance()
            idx = _parse_int_group()
            arg = parse()
            params = _parse_term_group()
            _expect_close()
            return Lam(p, idx, arg, tuple(params))
        raise ValueError(f"unknown term head {head!r}")

    def pos_advance():
        nonlocal pos
        pos += 1

    def _expect_close():
        nonlocal pos
        if tokens[pos] != ")":
            raise ValueError("expected ')'")
        pos += 1

    def _parse_until_close():
        nonlocal pos
        args = []
        while tokens[pos] != ")":
            args.append(parse())
        pos += 1
        return args

    def _parse_int_group():
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError("expected '('")
        pos += 1
        out = []
        while tokens[pos] != ")":
            out.append(int(tokens[pos]))
            pos += 1
        pos += 1
        return tuple(out)

    def _parse_term_group():
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError("expected '('")
        pos += 1
        out = []
        while tokens[pos] != ")":
            out.append(parse())
        pos += 1
        return out

    term = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after term")
    return term


# -- p-bases and imperfection degrees ---------------------------------------


def _frobenius_gens(D: SubfieldPresentation) -> tuple[RatFunc, ...]:
    p = D.ambient.spec.p
    return tuple(g ** p for g in D.gens)


def p_basis(D: SubfieldPresentation,
            spair_cap: int = DEFAULT_SPAIR_CAP) -> KTuple:
    """Left-greedy p-basis of D extracted from its generators: keep g exactly
    when g is outside D^(p)(kept) = GF(q)(gens^p, kept)."""
    amb = D.ambient
    frob = _frobenius_gens(D)
    kept: list[RatFunc] = []
    for g in D.gens:
        test = SubfieldPresentation(amb, frob + tuple(kept))
        if member(g, test, spair_cap) is None:
            kept.append(g)
    return tuple(kept)


def impdeg(D: SubfieldPresentation, spair_cap: int = DEFAULT_SPAIR_CAP) -> int:
    """Imperfection degree of D: the cardinality of a p-basis.  Finite for
    every finitely generated D, so this is also the elementary imperfection
    degree (the symbolically-infinite branch cannot occur here)."""
    return len(p_basis(D, spair_cap))


def impdeg_rel(E: SubfieldPresentation, D: SubfieldPresentation,
               spair_cap: int = DEFAULT_SPAIR_CAP) -> int:
    """Relative imperfection degree of E over D: size of a p-basis of E over
    D, greedily extracted from gens(E) against E^(p)D(kept)."""
    if E.ambient is not D.ambient:
        raise SpecMismatch("subfields of different ambients")
    amb = E.ambient
    frob = _frobenius_gens(E)
    kept: list[RatFunc] = []
    for g in E.gens:
        test = SubfieldPresentation(amb, frob + tuple(D.gens) + tuple(kept))
        if member(g, test, spair_cap) is None:
            kept.append(g)
    return len(kept)
