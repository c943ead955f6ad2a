"""Tiny expression language for profiles ``phi(s)``, differentiated with dual numbers.

Grammar::

    expr   := ["-"] term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := atom ("^" number)?
    atom   := number | "s" | "(" expr ")" | func "(" expr ")"
    func   := "sqrt" | "exp" | "sin" | "cos"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np


class PhiSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position


@dataclass(frozen=True)
class Dual:
    """``val + der * eps`` with ``eps**2 = 0``; fields may be numpy arrays."""

    val: object
    der: object

    @staticmethod
    def lift(x) -> "Dual":
        return x if isinstance(x, Dual) else Dual(x, 0.0)

    def __add__(self, other):
        other = Dual.lift(other)
        return Dual(self.val + other.val, self.der + other.der)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __sub__(self, other):
        return self + (-Dual.lift(other))

    def __rsub__(self, other):
        return Dual.lift(other) - self

    def __mul__(self, other):
        other = Dual.lift(other)
        return Dual(self.val * other.val, self.val * other.der + self.der * other.val)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Dual.lift(other)
        val = self.val / other.val
        return Dual(val, (self.der - val * other.der) / other.val)

    def __rtruediv__(self, other):
        return Dual.lift(other) / self

    def __pow__(self, p: float):
        if p == 0:
            return Dual(np.ones_like(self.val), np.zeros_like(self.der))
        return Dual(self.val**p, p * self.val ** (p - 1) * self.der)


def d_sqrt(x: Dual) -> Dual:
    r = np.sqrt(x.val)
    return Dual(r, x.der / (2 * r))


def d_exp(x: Dual) -> Dual:
    e = np.exp(x.val)
    return Dual(e, e * x.der)


def d_sin(x: Dual) -> Dual:
    return Dual(np.sin(x.val), np.cos(x.val) * x.der)


def d_cos(x: Dual) -> Dual:
    return Dual(np.cos(x.val), -np.sin(x.val) * x.der)


FUNCS = {"sqrt": d_sqrt, "exp": d_exp, "sin": d_sin, "cos": d_cos}

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*|\.\d+)|([A-Za-z_]+)|(.))")


# AST nodes are plain tuples: ("num", x) ("var",) ("neg", a) ("bin", op, a, b)
# ("pow", a, p) ("call", name, a)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok=None):
        tok = tok or self.peek()
        raise PhiSyntaxError(message, self.text, tok[2])

    def expect(self, op: str):
        tok = self.take()
        if tok[:2] != ("op", op):
            self.fail(f"expected {op!r}", tok)

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return node

    def expr(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            node = ("neg", self.term())
        else:
            node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = ("bin", op, node, self.factor())
        return node

    def factor(self):
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a number", tok)
            node = ("pow", node, float(tok[1]))
        return node

    def atom(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            return ("num", float(text))
        if kind == "name":
            if text == "s":
                return ("var",)
            if text in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", text, arg)
            self.fail(f"unknown name {text!r}", tok)
        if (kind, text) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail("expected a number, 's', a function or '('", tok)


def parse(text: str):
    return _Parser(text).parse()


def evaluate(node, x: Dual) -> Dual:
    tag = node[0]
    if tag == "num":
        return Dual(node[1] + 0.0 * x.val, 0.0 * x.val)
    if tag == "var":
        return x
    if tag == "neg":
        return -evaluate(node[1], x)
    if tag == "bin":
        a, b = evaluate(node[2], x), evaluate(node[3], x)
        op = node[1]
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        return a / b
    if tag == "pow":
        return evaluate(node[1], x) ** node[2]
    return FUNCS[node[1]](evaluate(node[2], x))


def depends_on_s(node) -> bool:
    if node[0] == "var":
        return True
    return any(depends_on_s(c) for c in node[1:] if isinstance(c, tuple))
