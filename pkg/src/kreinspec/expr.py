"""Coefficient expression trees.

Grammar (whitespace insignificant, numbers are unsigned decimals with optional
exponent; bounds additionally accept a leading minus):

    expr      := term (("+"|"-") term)*
    term      := factor (("*"|"/") factor)*
    factor    := base ("^" number)?
    base      := number | "x" | fn "(" expr ")" | "(" expr ")" | "-" base | piecewise
    fn        := "exp"|"log"|"sin"|"cos"|"cosh"|"sech"|"abs"|"sgn"
    piecewise := "pw" "{" (interval ":" expr ";")+ "}"
    interval  := "[" bound "," bound ")"
    bound     := ["-"] number | "-inf" | "inf"

Conventions: sgn(0) = +1 (so weight functions never vanish at a node);
sech is evaluated in overflow-safe form.  Every evaluation either returns
finite reals or raises EvalDomainError; NaN and inf never leak out.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvalDomainError, ExprSyntaxError

_FUNCTIONS = ("exp", "log", "sin", "cos", "cosh", "sech", "abs", "sgn")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<punct>[-+*/^(){}\[\],:;]))"
)


class CoeffExpr:
    """Base class for parsed coefficient expressions."""

    def __call__(self, x):
        scalar = np.isscalar(x)
        arr = np.asarray(x, dtype=float)
        out = self._eval(arr)
        _require_finite(out, self)
        return float(out) if scalar else out

    def _eval(self, x):
        raise NotImplementedError

    def to_text(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()!r})"


def _require_finite(values, node):
    if not np.all(np.isfinite(values)):
        raise EvalDomainError(f"non-finite value from {node.to_text()}")


@dataclass(frozen=True, repr=False)
class Const(CoeffExpr):
    value: float

    def _eval(self, x):
        return np.full_like(x, self.value)

    def to_text(self):
        return repr(self.value)


@dataclass(frozen=True, repr=False)
class Var(CoeffExpr):
    def _eval(self, x):
        return x

    def to_text(self):
        return "x"


@dataclass(frozen=True, repr=False)
class Neg(CoeffExpr):
    arg: CoeffExpr

    def _eval(self, x):
        return -self.arg._eval(x)

    def to_text(self):
        return f"(-{self.arg.to_text()})"


@dataclass(frozen=True, repr=False)
class BinOp(CoeffExpr):
    op: str
    left: CoeffExpr
    right: CoeffExpr

    def _eval(self, x):
        a = self.left._eval(x)
        b = self.right._eval(x)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if np.any(b == 0.0):
            raise EvalDomainError(f"division by zero in {self.to_text()}")
        return a / b

    def to_text(self):
        return f"({self.left.to_text()}{self.op}{self.right.to_text()})"


@dataclass(frozen=True, repr=False)
class Pow(CoeffExpr):
    base: CoeffExpr
    exponent: float

    def _eval(self, x):
        a = self.base._eval(x)
        e = self.exponent
        if e != int(e) and np.any(a < 0):
            raise EvalDomainError(f"negative base for fractional power in {self.to_text()}")
        if e < 0 and np.any(a == 0.0):
            raise EvalDomainError(f"zero base for negative power in {self.to_text()}")
        with np.errstate(over="ignore"):
            return np.power(a, e)

    def to_text(self):
        return f"({self.base.to_text()}^{repr(self.exponent)})"


@dataclass(frozen=True, repr=False)
class Fn(CoeffExpr):
    name: str
    arg: CoeffExpr

    def _eval(self, x):
        a = self.arg._eval(x)
        name = self.name
        if name == "exp":
            with np.errstate(over="ignore"):
                return np.exp(a)
        if name == "log":
            if np.any(a <= 0.0):
                raise EvalDomainError(f"log of nonpositive value in {self.to_text()}")
            return np.log(a)
        if name == "sin":
            return np.sin(a)
        if name == "cos":
            return np.cos(a)
        if name == "cosh":
            with np.errstate(over="ignore"):
                return np.cosh(a)
        if name == "sech":
            # 2e^{-|a|} / (1 + e^{-2|a|}) never overflows
            t = np.exp(-np.abs(a))
            return 2.0 * t / (1.0 + t * t)
        if name == "abs":
            return np.abs(a)
        # sgn with sgn(0) = +1
        return np.where(a >= 0.0, 1.0, -1.0)

    def to_text(self):
        return f"{self.name}({self.arg.to_text()})"


@dataclass(frozen=True, repr=False)
class Piecewise(CoeffExpr):
    pieces: tuple  # of (lo, hi, CoeffExpr), half-open [lo, hi)

    def _eval(self, x):
        out = np.empty_like(x)
        covered = np.zeros(x.shape, dtype=bool)
        for lo, hi, sub in self.pieces:
            mask = (x >= lo) & (x < hi)
            if mask.any():
                out[mask] = sub._eval(x[mask])
            covered |= mask
        if not covered.all():
            bad = np.asarray(x)[~covered]
            raise EvalDomainError(f"piecewise expression undefined at x={bad.flat[0]}")
        return out

    def to_text(self):
        parts = "".join(
            f"[{_bound_text(lo)},{_bound_text(hi)}): {sub.to_text()}; "
            for lo, hi, sub in self.pieces
        )
        return "pw{" + parts.rstrip() + "}"


def _bound_text(v):
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return repr(v)


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = []
        pos = 0
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None or m.end() == pos:
                stripped = src[pos:].lstrip()
                if not stripped:
                    break
                at = len(src) - len(stripped) + 1
                raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
            kind = m.lastgroup
            text = m.group(kind)
            # 1-based position of the token text itself
            self.tokens.append((kind, text, m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("end", "", len(self.src) + 1)

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, text):
        kind, got, pos = self.next()
        if got != text:
            raise ExprSyntaxError(f"expected {text!r}, found {got or 'end of input'!r}", pos)

    def parse(self):
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.next()[1]
            e = BinOp(op, e, self.factor())
        return e

    def factor(self):
        e = self.base()
        if self.peek()[1] == "^":
            self.next()
            e = Pow(e, self.exponent_number())
        return e

    def exponent_number(self):
        sign = 1.0
        if self.peek()[1] == "-":
            self.next()
            sign = -1.0
        kind, text, pos = self.next()
        if kind != "num":
            raise ExprSyntaxError(f"expected numeric exponent, found {text or 'end of input'!r}", pos)
        return sign * float(text)

    def base(self):
        kind, text, pos = self.next()
        if kind == "num":
            return Const(float(text))
        if text == "-":
            return Neg(self.base())
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if text == "x":
                return Var()
            if text == "pw":
                return self.piecewise()
            if text in _FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Fn(text, arg)
            raise ExprSyntaxError(f"unknown identifier {text!r}", pos)
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", pos)

    def piecewise(self):
        self.expect("{")
        pieces = []
        while True:
            self.expect("[")
            lo = self.bound()
            self.expect(",")
            hi = self.bound()
            self.expect(")")
            self.expect(":")
            sub = self.expr()
            self.expect(";")
            pieces.append((lo, hi, sub))
            if self.peek()[1] == "}":
                self.next()
                break
            if self.peek()[0] == "end":
                raise ExprSyntaxError("unterminated piecewise block", self.peek()[2])
        pieces.sort(key=lambda p: p[0])
        for (lo, hi, _), (lo2, _, _) in zip(pieces, pieces[1:]):
            if hi > lo2:
                raise ExprSyntaxError(f"piecewise overlap near bound {lo2!r}", 1)
        for lo, hi, _ in pieces:
            if not lo < hi:
                raise ExprSyntaxError(f"empty piecewise interval [{lo},{hi})", 1)
        return Piecewise(tuple(pieces))

    def bound(self):
        sign = 1.0
        if self.peek()[1] == "-":
            self.next()
            sign = -1.0
        kind, text, pos = self.next()
        if kind == "name" and text == "inf":
            return sign * math.inf
        if kind == "num":
            return sign * float(text)
        raise ExprSyntaxError(f"expected interval bound, found {text or 'end of input'!r}", pos)


def parse_expression(src):
    """Parse a coefficient expression; raises ExprSyntaxError with a 1-based position."""
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 1)
    return _Parser(src).parse()


def to_text(expr):
    """Render an expression to text that parses back to an equivalent tree."""
    return expr.to_text()
