"""Expression text grammar.

identifiers, integer literals, + - * / ^, parentheses; jet references
``u[x1,x1,x2]`` (derivative directions, order irrelevant); order 0 is
``u`` or ``u[]``.

Names are resolved through a caller-supplied resolver so the same
grammar serves plain variables, jets and named definitions.
"""
from __future__ import annotations

import re

from .errors import ProblemSyntaxError
from .symcore import RationalExpr

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\^|[-+*/()\[\],]))"
)


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.items = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == m.start():
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                raise ProblemSyntaxError(
                    f"unexpected character {stripped[0]!r}", column=pos + 1
                )
            kind = m.lastgroup
            self.items.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.items[self.i] if self.i < len(self.items) else (None, None, len(self.text))

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, value):
        kind, val, pos = self.next()
        if val != value:
            raise ProblemSyntaxError(
                f"expected {value!r}, found {val!r}", column=pos + 1
            )


def parse_expression(text, resolver):
    """Parse ``text`` into a RationalExpr.

    ``resolver(name, directions, position)`` must return a RationalExpr;
    ``directions`` is None for a bare identifier and a (possibly empty)
    list of direction names for a jet reference ``name[d1,...]``.
    """
    toks = _Tokens(text)
    expr = _parse_sum(toks, resolver)
    kind, val, pos = toks.peek()
    if kind is not None:
        raise ProblemSyntaxError(f"trailing input {val!r}", column=pos + 1)
    return expr


def _parse_sum(toks, resolver):
    left = _parse_product(toks, resolver)
    while True:
        kind, val, _ = toks.peek()
        if val == "+":
            toks.next()
            left = left + _parse_product(toks, resolver)
        elif val == "-":
            toks.next()
            left = left - _parse_product(toks, resolver)
        else:
            return left


def _parse_product(toks, resolver):
    left = _parse_unary(toks, resolver)
    while True:
        kind, val, pos = toks.peek()
        if val == "*":
            toks.next()
            left = left * _parse_unary(toks, resolver)
        elif val == "/":
            toks.next()
            right = _parse_unary(toks, resolver)
            if right.is_zero():
                raise ProblemSyntaxError("division by zero", column=pos + 1)
            left = left / right
        else:
            return left


def _parse_unary(toks, resolver):
    kind, val, _ = toks.peek()
    if val == "-":
        toks.next()
        return -_parse_unary(toks, resolver)
    if val == "+":
        toks.next()
        return _parse_unary(toks, resolver)
    return _parse_power(toks, resolver)


def _parse_power(toks, resolver):
    base = _parse_atom(toks, resolver)
    kind, val, pos = toks.peek()
    if val == "^":
        toks.next()
        sign = 1
        kind, val, pos = toks.peek()
        if val == "-":
            toks.next()
            sign = -1
        kind, val, pos = toks.next()
        if kind != "int":
            raise ProblemSyntaxError("exponent must be an integer", column=pos + 1)
        return base ** (sign * int(val))
    return base


def _parse_atom(toks, resolver):
    kind, val, pos = toks.next()
    if kind == "int":
        return RationalExpr.const(int(val))
    if val == "(":
        inner = _parse_sum(toks, resolver)
        toks.expect(")")
        return inner
    if kind == "name":
        directions = None
        k2, v2, _ = toks.peek()
        if v2 == "[":
            toks.next()
            directions = []
            k3, v3, p3 = toks.peek()
            if v3 != "]":
                while True:
                    k3, v3, p3 = toks.next()
                    if k3 != "name":
                        raise ProblemSyntaxError(
                            "expected a direction name", column=p3 + 1
                        )
                    directions.append(v3)
                    k3, v3, p3 = toks.next()
                    if v3 == "]":
                        break
                    if v3 != ",":
                        raise ProblemSyntaxError(
                            f"expected ',' or ']', found {v3!r}", column=p3 + 1
                        )
            else:
                toks.next()
        return resolver(val, directions, pos)
    raise ProblemSyntaxError(f"unexpected token {val!r}", column=pos + 1)
