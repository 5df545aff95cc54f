"""The shared expression grammar and session configuration.

    expr     := ['-'] term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := atom ('^' exponent)?
    exponent := nat | '(' nat ')'
    atom     := var | nat | 'gen' | '(' expr ')'

`gen` denotes the extension-field generator when the session field has
degree m > 1.  Field literals are written GF(p) or GF(p^m).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError, UnknownVariable
from .gf import FieldSpec
from .poly import DEFAULT_SPAIR_CAP
from .ratfunc import AmbientField, RatFunc

_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
                       r"|(?P<op>[-+*/^()]))")


def parse_field_literal(src: str) -> FieldSpec:
    m = re.fullmatch(r"\s*GF\(\s*(\d+)\s*(?:\^\s*(\d+)\s*)?\)\s*", src)
    if m is None:
        raise ParseError(f"not a field literal: {src!r}", 0, ("GF(p)", "GF(p^m)"))
    p = int(m.group(1))
    deg = int(m.group(2)) if m.group(2) else 1
    try:
        return FieldSpec.get(p, deg)
    except ValueError as e:
        raise ParseError(str(e), 0) from None


@dataclass(frozen=True)
class SessionConfig:
    """One CLI session: the field, the ambient variables, caps, and seed."""
    field: FieldSpec
    vars: tuple[str, ...]
    spair_cap: int = DEFAULT_SPAIR_CAP
    seed: int = 0

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ParseError("duplicate variable names", 0)
        for name in self.vars:
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name) or name == "gen":
                raise ParseError(f"bad variable name {name!r}", 0)

    @property
    def ambient(self) -> AmbientField:
        return AmbientField.get(self.field, self.vars)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            if src[pos:].strip():
                raise ParseError(f"unexpected character {src[pos:].lstrip()[0]!r}",
                                 pos, ("operator", "number", "identifier"))
            break
        if m.group("int") is not None:
            tokens.append(("int", int(m.group("int")), m.start("int")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", None, len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, cfg: SessionConfig):
        self.src = src
        self.cfg = cfg
        self.amb = cfg.ambient
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos, (op,))
        return self.advance()

    def parse(self) -> RatFunc:
        value = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"trailing input {val!r}", pos, ("end of input",))
        return value

    def expr(self) -> RatFunc:
        kind, val, pos = self.peek()
        negate = False
        if kind == "op" and val == "-":
            self.advance()
            negate = True
        acc = self.term()
        if negate:
            acc = -acc
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self) -> RatFunc:
        acc = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.factor()
                acc = acc * rhs if val == "*" else acc / rhs
            else:
                return acc

    def factor(self) -> RatFunc:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            e = self.exponent()
            return base ** e
        return base

    def exponent(self) -> int:
        kind, val, pos = self.peek()
        if kind == "int":
            self.advance()
            return val
        if kind == "op" and val == "(":
            self.advance()
            kind, inner, pos = self.peek()
            if kind != "int":
                raise ParseError("expected a natural number exponent", pos,
                                 ("natural number",))
            self.advance()
            self.expect_op(")")
            return inner
        raise ParseError("expected an exponent", pos,
                         ("natural number", "( nat )"))

    def atom(self) -> RatFunc:
        kind, val, pos = self.peek()
        if kind == "int":
            self.advance()
            return self.amb.int_const(val)
        if kind == "name":
            self.advance()
            if val == "gen":
                if self.cfg.field.m == 1:
                    raise UnknownVariable(
                        "the generator 'gen' exists only for extension fields")
                return self.amb.const(self.cfg.field.gen)
            if val in self.cfg.vars:
                return self.amb.var(self.cfg.vars.index(val))
            raise UnknownVariable(f"unknown variable {val!r} at position {pos}")
        if kind == "op" and val == "(":
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError("expected an atom", pos,
                         ("variable", "number", "( expr )"))


def parse_element(src: str, cfg: SessionConfig) -> RatFunc:
    """Parse an element of the session's ambient field."""
    return _Parser(src, cfg).parse()


def parse_tuple(src: str, cfg: SessionConfig) -> tuple[RatFunc, ...]:
    """Comma-separated elements; the empty string is the empty tuple."""
    if not src.strip():
        return ()
    return tuple(parse_element(part, cfg) for part in src.split(","))
