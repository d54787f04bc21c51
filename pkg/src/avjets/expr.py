"""A small expression language for rational functions and truncated series.

Grammar (whitespace ignored; the unicode minus sign is accepted as ``-``)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" exponent)?
    exponent := ["-" | "+"] INTEGER | "(" ["-" | "+"] INTEGER ")"
    atom   := INTEGER | DECIMAL | NAME | "(" expr ")"

``**`` is accepted as a synonym for ``^``.  Parsing produces a tree that can
be evaluated in any algebra: names are looked up in an environment, number
literals are lifted into the algebra, and division or negative powers use
the value's ``inverse`` (rational functions) or ``unit_invert`` (series).
Errors report the column within the expression.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from avjets.algebra.rings import FnElem, FnRing
from avjets.algebra.series import TruncSeries
from avjets.errors import NonUnit, ParseError

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\*\*|[-+*/^()]))")


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Name:
    name: str
    column: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    column: int


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int
    column: int


def _normalize(text: str) -> str:
    return text.replace("−", "-").replace("·", "*")


def tokenize(text: str, source: str | None = None) -> list[tuple[str, str, int]]:
    text = _normalize(text)
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r} in expression {text!r}", 1, col, source)
        num, name, op = m.groups()
        col = m.start(m.lastindex) + 1
        if num is not None:
            out.append(("num", num, col))
        elif name is not None:
            out.append(("name", name, col))
        else:
            out.append(("op", "^" if op == "**" else op, col))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, source: str | None):
        self.tokens = tokenize(text, source)
        self.text = text
        self.i = 0
        self.source = source

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(f"{message} in expression {self.text!r}", 1, tok[2], self.source)

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] != "op":
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            tok = self.take()
            node = BinOp(tok[1], node, self.term(), tok[2])
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            node = BinOp(tok[1], node, self.unary(), tok[2])
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            arg = self.unary()
            return Neg(arg) if tok[1] == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            return Pow(base, self.exponent(), tok[2])
        return base

    def exponent(self) -> int:
        paren = False
        if self.peek()[1] == "(" and self.peek()[0] == "op":
            self.take()
            paren = True
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "num" or "." in tok[1]:
            self.error("exponent must be an integer", tok)
        if paren:
            self.expect(")")
        return sign * int(tok[1])

    def atom(self):
        tok = self.take()
        if tok[0] == "num":
            return Num(Fraction(tok[1]))
        if tok[0] == "name":
            return Name(tok[1], tok[2])
        if tok[0] == "op" and tok[1] == "(":
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {tok[1] or 'end of input'!r}", tok)


def parse_expr(text: str, source: str | None = None):
    if not isinstance(text, str):
        raise ParseError(f"expected an expression string, got {type(text).__name__}", None, None, source)
    return _Parser(text, source).parse()


def _invert(value, column, source):
    try:
        if isinstance(value, Fraction):
            if not value:
                raise NonUnit("division by zero")
            return 1 / value
        if isinstance(value, TruncSeries):
            return value.unit_invert()
        return value.inverse()
    except NonUnit as exc:
        raise ParseError(f"cannot divide: {exc}", 1, column, source) from exc


def evaluate(node, env: Mapping, one=Fraction(1), source: str | None = None):
    """Evaluate a parsed tree.  Literals are lifted through ``one``, which fixes the algebra."""
    if isinstance(node, Num):
        return one * node.value
    if isinstance(node, Name):
        if node.name not in env:
            raise ParseError(f"unknown name {node.name!r}", 1, node.column, source)
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.arg, env, one, source)
    if isinstance(node, Pow):
        base = evaluate(node.base, env, one, source)
        if node.exponent >= 0:
            return base ** node.exponent
        return _invert(base, node.column, source) ** (-node.exponent)
    if isinstance(node, BinOp):
        a = evaluate(node.left, env, one, source)
        b = evaluate(node.right, env, one, source)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a * _invert(b, node.column, source)
    raise TypeError(f"not an expression node: {node!r}")


def parse_function(text: str, ring: FnRing, params: Mapping | None = None, source: str | None = None) -> FnElem:
    """A rational function in the ring's variables, with denominators that must be units."""
    env = {name: ring.var(i) for i, name in enumerate(ring.names)}
    for k, v in (params or {}).items():
        env[k] = ring.coerce(v)
    value = evaluate(parse_expr(text, source), env, ring.one, source)
    return ring.coerce(value)


def parse_scalar(text, params: Mapping | None = None, source: str | None = None) -> Fraction:
    """A rational constant, given as a number or an expression in the parameters."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    env = {k: Fraction(v) for k, v in (params or {}).items()}
    value = evaluate(parse_expr(str(text), source), env, Fraction(1), source)
    if not isinstance(value, Fraction):
        raise ParseError(f"{text!r} is not a constant", 1, 1, source)
    return value


def parse_series(text: str, ring, names, order: int, params: Mapping | None = None,
                 source: str | None = None) -> TruncSeries:
    """A truncated series in the jet variables ``names`` with coefficients in ``ring``."""
    n = len(names)
    env = {name: TruncSeries.var(ring, n, order, i) for i, name in enumerate(names)}
    if isinstance(ring, FnRing):
        for i, name in enumerate(ring.names):
            env.setdefault(name, TruncSeries.const(ring, n, order, ring.var(i)))
    for k, v in (params or {}).items():
        env[k] = TruncSeries.const(ring, n, order, v)
    one = TruncSeries.one(ring, n, order)
    value = evaluate(parse_expr(text, source), env, one, source)
    if not isinstance(value, TruncSeries):
        value = one.scale(value)
    return value
