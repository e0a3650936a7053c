"""Arithmetic expressions in one real variable ``x``.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | 'pi' | 'x' | FUNC '(' expr ')' | '(' expr ')'

FUNC is one of sin, cos, exp, log, sqrt, abs. Expressions are compiled to
numpy code, so a compiled expression evaluates scalars and arrays alike.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifierError

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "abs")

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5
_BINARY_PREC = {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}


class Expr:
    """Base class of the expression AST."""

    precedence = _PREC_ATOM

    def __str__(self):
        return self._fmt()

    def _fmt(self) -> str:
        raise NotImplementedError

    def _src(self) -> str:
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return "x" not in self.variables()

    def variables(self) -> set:
        return set()

    @cached_property
    def compiled(self) -> "CompiledExpr":
        return CompiledExpr(self)

    def __call__(self, x):
        return self.compiled(x)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float

    @property
    def precedence(self):
        return _PREC_UNARY if math.copysign(1.0, self.value) < 0 else _PREC_ATOM

    def _fmt(self):
        return repr(float(self.value))

    def _src(self):
        return repr(float(self.value))


@dataclass(frozen=True, eq=True)
class Const(Expr):
    name: str = "pi"

    def _fmt(self):
        return self.name

    def _src(self):
        return "_pi"


@dataclass(frozen=True, eq=True)
class Var(Expr):
    def _fmt(self):
        return "x"

    def _src(self):
        return "x"

    def variables(self):
        return {"x"}


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    operand: Expr
    precedence = _PREC_UNARY

    def _fmt(self):
        inner = self.operand._fmt()
        if self.operand.precedence < _PREC_UNARY:
            inner = f"({inner})"
        return f"-{inner}"

    def _src(self):
        return f"(-{self.operand._src()})"

    def variables(self):
        return self.operand.variables()


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def precedence(self):
        return _BINARY_PREC[self.op]

    def _fmt(self):
        prec = self.precedence
        lhs, rhs = self.left._fmt(), self.right._fmt()
        if self.op == "^":
            # right-assoc; exponent is a unary-level operand
            if self.left.precedence <= prec:
                lhs = f"({lhs})"
            if self.right.precedence < _PREC_UNARY:
                rhs = f"({rhs})"
            return f"{lhs}^{rhs}"
        if self.left.precedence < prec:
            lhs = f"({lhs})"
        if self.right.precedence <= prec:
            rhs = f"({rhs})"
        return f"{lhs} {self.op} {rhs}" if prec == _PREC_ADD else f"{lhs}*{rhs}" if self.op == "*" else f"{lhs}/{rhs}"

    def _src(self):
        a, b = self.left._src(), self.right._src()
        if self.op == "^":
            return f"_pow({a}, {b})"
        if self.op == "/":
            return f"_div({a}, {b})"
        return f"({a} {self.op} {b})"

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr

    def _fmt(self):
        return f"{self.func}({self.arg._fmt()})"

    def _src(self):
        return f"_{self.func}({self.arg._src()})"

    def variables(self):
        return self.arg.variables()


_NAMESPACE = {
    "_pi": math.pi,
    "_pow": np.power,
    "_div": np.divide,
    "_sin": np.sin,
    "_cos": np.cos,
    "_exp": np.exp,
    "_log": np.log,
    "_sqrt": np.sqrt,
    "_abs": np.abs,
}


class CompiledExpr:
    """Vectorised evaluator generated from an AST.

    Returns a Python float for scalar input and an ndarray otherwise. Invalid
    operations (log of a negative number, 0/0, ...) yield nan/inf rather than
    raising; callers decide what is an error.
    """

    def __init__(self, expr: Expr):
        self.expr = expr
        self.source = expr._src()
        self.is_constant = expr.is_constant
        self._fn = eval(f"lambda x: {self.source}", dict(_NAMESPACE))  # noqa: S307 - generated from our own AST
        if self.is_constant:
            with np.errstate(all="ignore"):
                self.constant = float(self._fn(0.0))
        else:
            self.constant = None

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        if self.is_constant:
            if xa.ndim == 0:
                return self.constant
            return np.full(xa.shape, self.constant)
        with np.errstate(all="ignore"):
            out = self._fn(xa)
        if xa.ndim == 0:
            return float(out)
        return np.asarray(out, dtype=float)


# --------------------------------------------------------------------------- parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = []  # (kind, text, char offset)
        pos = 0
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None:
                raise ExprSyntaxError(f"unexpected character {src[pos]!r}", self._byte(pos))
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.tokens.append(("eof", "", len(src)))
        self.i = 0

    def _byte(self, char_offset):
        return len(self.src[:char_offset].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, got, off = self.take()
        if got != text:
            shown = got or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, got {shown!r}", self._byte(off))

    def parse(self) -> Expr:
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected token {text!r}", self._byte(off))
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, off = self.take()
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"number {text!r} overflows", self._byte(off))
            return Num(value)
        if kind == "name":
            if text == "x":
                return Var()
            if text == "pi":
                return Const("pi")
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", self._byte(off))
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        shown = text or "end of input"
        raise ExprSyntaxError(f"unexpected {shown!r}", self._byte(off))


def parse_expression(src: str) -> Expr:
    """Parse `src` into an :class:`Expr`.

    Raises:
        ExprSyntaxError: malformed input; ``offset`` gives the byte position.
        UnknownIdentifierError: a name other than ``x``, ``pi`` or a known function.
    """
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(src).parse()


def evaluate_checked(expr: Expr, x, segment=None):
    """Evaluate and raise :class:`DomainError` on any non-finite result."""
    val = expr(x)
    bad = ~np.isfinite(val)
    if np.any(bad):
        where = float(np.asarray(x, dtype=float)[bad][0]) if np.ndim(val) else float(x)
        seg = "" if segment is None else f" in segment {segment}"
        raise DomainError(f"{expr} is not finite at x = {where!r}{seg}", x=where, segment=segment)
    return val


ZERO = Num(0.0)
ONE = Num(1.0)
