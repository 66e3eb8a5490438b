"""Recursive-descent parser and printer for polynomials in x1 .. xn."""
from __future__ import annotations

import re
from fractions import Fraction

from ..errors import InputError
from .poly import Poly

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S)")


class ParseError(InputError):
    def __init__(self, message, text, pos):
        super().__init__(f"{message} at position {pos}: {text[:pos]}<here>{text[pos:]}")
        self.pos = pos
        self.text = text


def _tokens(text):
    out = []
    for m in _TOKEN.finditer(text):
        num, name, ch = m.groups()
        if num:
            out.append(("num", num, m.start()))
        elif name:
            out.append(("name", name, m.start()))
        elif ch in "+-*/^()":
            out.append((ch, ch, m.start()))
        else:
            raise ParseError(f"unexpected character {ch!r}", text, m.start())
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, nvars):
        self.text = text
        self.n = nvars
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = {"end": "end of input", "num": "a number"}.get(kind, repr(kind))
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {want}, found {found}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        p = self.expr()
        self.take("end")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if q.degree() > 0:
                    raise ParseError("division by a non-constant", self.text, pos)
                c = q.constant()
                if c == 0:
                    raise ParseError("division by zero", self.text, pos)
                p = p.scale(1 / c)
        return p

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        if self.peek()[0] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            if self.peek()[0] == "-":
                raise ParseError("negative exponent", self.text, self.peek()[2])
            base = base ** int(self.take("num")[1])
        return base

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Poly.const(self.n, int(val))
        if kind == "name":
            self.take()
            m = re.fullmatch(r"x([1-9]\d*)", val)
            if not m or int(m.group(1)) > self.n:
                raise ParseError(f"unknown variable {val!r} (expected x1..x{self.n})", self.text, pos)
            return Poly.var(self.n, int(m.group(1)) - 1)
        if kind == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"expected a number, variable or '(', found {found}", self.text, pos)


def parse_poly(text: str, nvars: int) -> Poly:
    if not isinstance(text, str):
        raise InputError("polynomial text must be a string")
    return _Parser(text, nvars).parse()


def _order(term):
    e, _ = term
    return (-sum(e), tuple(-k for k in e))


def _coeff_text(c: Fraction):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Canonical text: graded order, highest degree first, x1 before x2."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in sorted(p.terms, key=_order):
        mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
        mag = abs(c)
        if not mono:
            body = _coeff_text(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_coeff_text(mag)}*{mono}"
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)
