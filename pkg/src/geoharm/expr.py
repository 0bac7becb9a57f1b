"""Parser and evaluator for radial profile expressions in the variable ``t``.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' factor)?
    atom   := number | 't' | '(' expr ')' | func '(' expr ')'
    func   := 'exp' | 'log' | 'sqrt'

Exponents must be constant. A parsed expression compiles to a closure that
accepts floats, numpy arrays, or :class:`~geoharm.dual.Dual` values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .dual import Dual
from .errors import ProfileSyntaxError

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


def _exp(x):
    return x.exp() if isinstance(x, Dual) else np.exp(x)


def _log(x):
    return x.log() if isinstance(x, Dual) else np.log(x)


def _sqrt(x):
    return x.sqrt() if isinstance(x, Dual) else np.sqrt(x)


FUNCTIONS = {"exp": _exp, "log": _log, "sqrt": _sqrt}

Token = Tuple[str, str, int]  # (kind, text, offset)


def tokenize(source: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    n = len(source)
    while True:
        while pos < n and source[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ProfileSyntaxError(pos, f"unexpected character {source[pos]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


# AST nodes are plain tuples: ("num", v) ("var",) ("bin", op, l, r)
# ("pow", base, p) ("call", name, arg)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok[1] != text or tok[0] == "end":
            raise ProfileSyntaxError(tok[2], f"expected {text!r}")
        return self.take()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ProfileSyntaxError(tok[2], f"unexpected token {tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = ("bin", op, node, self.factor())
        return node

    def factor(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            start = self.peek()[2]
            exponent = self.factor()
            if _uses_t(exponent):
                raise ProfileSyntaxError(start, "exponent must be constant")
            with np.errstate(all="ignore"):
                p = float(compile_node(exponent)(0.0))
            if not np.isfinite(p):
                raise ProfileSyntaxError(start, "exponent is not finite")
            return ("pow", base, p)
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return ("num", float(text))
        if kind == "ident":
            if text == "t":
                return ("var",)
            if text not in FUNCTIONS:
                raise ProfileSyntaxError(pos, f"unknown identifier {text!r}")
            self.expect("(")
            if self.peek()[1] == ")" and self.peek()[0] == "op":
                raise ProfileSyntaxError(self.peek()[2], f"{text} expects 1 argument, got 0")
            arg = self.expr()
            if self.peek()[1] == "," and self.peek()[0] == "op":
                raise ProfileSyntaxError(self.peek()[2], f"{text} expects 1 argument")
            self.expect(")")
            return ("call", text, arg)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ProfileSyntaxError(pos, "unexpected end of input")
        raise ProfileSyntaxError(pos, f"unexpected token {text!r}")


def _uses_t(node) -> bool:
    tag = node[0]
    if tag == "var":
        return True
    if tag == "num":
        return False
    if tag == "bin":
        return _uses_t(node[2]) or _uses_t(node[3])
    if tag == "pow":
        return _uses_t(node[1])
    return _uses_t(node[2])


def compile_node(node) -> Callable:
    tag = node[0]
    if tag == "num":
        v = node[1]
        return lambda t: v
    if tag == "var":
        return lambda t: t
    if tag == "bin":
        op, lf, rf = node[1], compile_node(node[2]), compile_node(node[3])
        if op == "+":
            return lambda t: lf(t) + rf(t)
        if op == "-":
            return lambda t: lf(t) - rf(t)
        if op == "*":
            return lambda t: lf(t) * rf(t)
        return lambda t: _div(lf(t), rf(t))
    if tag == "pow":
        bf, p = compile_node(node[1]), node[2]
        return lambda t: _pow(bf(t), p)
    fn, af = FUNCTIONS[node[1]], compile_node(node[2])
    return lambda t: fn(af(t))


def _div(a, b):
    if isinstance(a, Dual) or isinstance(b, Dual):
        return Dual._lift(a) / b
    # numpy semantics: poles become inf/nan instead of raising
    return np.divide(a, b)


def _pow(a, p):
    if isinstance(a, Dual):
        return a ** p
    return np.power(a, p)


@dataclass(frozen=True)
class Expression:
    """A compiled profile expression ``h(t)``."""

    source: str
    tree: tuple

    def __post_init__(self):
        object.__setattr__(self, "_fn", compile_node(self.tree))

    def __call__(self, t):
        return self._fn(t)

    @property
    def is_constant(self) -> bool:
        return not _uses_t(self.tree)


def parse_expression(source: str) -> Expression:
    """Parse ``source``; raises :class:`ProfileSyntaxError` on invalid input."""
    return Expression(source, _Parser(source).parse())


def random_positive_source(rng: np.random.Generator, depth: int = 2) -> str:
    """Random profile source that is smooth and positive for all ``t >= 0``.

    Built only from operations that preserve positivity on ``[0, inf)``:
    sums, products and quotients of positive terms, ``exp``, ``sqrt`` and
    constant powers.
    """

    def coef(lo=0.2, hi=2.0) -> str:
        return f"{rng.uniform(lo, hi):.6g}"

    def leaf() -> str:
        k = int(rng.integers(0, 5))
        if k == 0:
            return coef()
        if k == 1:
            return f"({coef()} + {coef(0.0, 1.0)}*t)"
        if k == 2:
            # no unary minus in the grammar, so decay is written as 1/exp
            return rng.choice(["exp", "1/exp"]) + f"({coef(0.0, 0.5)}*t)"
        if k == 3:
            return f"sqrt({coef()} + t)"
        return f"1/({coef()} + {coef(0.0, 1.0)}*t)"

    def build(d: int) -> str:
        if d == 0:
            return leaf()
        k = int(rng.integers(0, 4))
        left, right = build(d - 1), build(d - 1)
        if k == 0:
            return f"({left} + {right})"
        if k == 1:
            return f"{left} * {right}"
        if k == 2:
            return f"{left} / {right}"
        return f"({left})^{coef(0.5, 1.5)}"

    return build(depth)
