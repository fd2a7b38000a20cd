"""A small arithmetic-expression language for user-supplied ``F(x)`` and ``p(x)``.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' unary)?            # right associative
    atom    := NUMBER | 'pi' | 'x' | NAME '(' expr ')' | '(' expr ')'

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^9``.  Function names:
exp sin cos tan sinh cosh tanh csch sech sqrt abs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polyalg import EXACT, FLOAT, Poly


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, msg: str, offset: int, expected: frozenset = frozenset()):
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{msg} at offset {offset}{detail}")
        self.offset = offset
        self.expected = expected


class UnknownIdentifierError(ExprSyntaxError):
    pass


class ExprEvalError(ExprError):
    def __init__(self, msg: str, span: tuple[int, int]):
        super().__init__(f"{msg} at {span[0]}:{span[1]}")
        self.span = span


class ExprDivisionByZero(ExprEvalError):
    pass


class ExprDomainError(ExprEvalError):
    pass


@dataclass(frozen=True)
class Expr:
    span: tuple


@dataclass(frozen=True)
class Num(Expr):
    value: float
    text: str


@dataclass(frozen=True)
class Pi(Expr):
    pass


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr


def _csch(v):
    return 1.0 / np.sinh(v)


def _sech(v):
    return 1.0 / np.cosh(v)


FUNCTIONS = {
    "exp": np.exp, "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "csch": _csch, "sech": _sech, "sqrt": np.sqrt, "abs": np.abs,
}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    toks = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start, m.end()))
        pos = m.end()
    toks.append(("end", "", len(src), len(src)))
    return toks


_ATOM_START = frozenset({"number", "x", "pi", "function", "(", "-", "+"})


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != op:
            raise ExprSyntaxError(f"expected {op!r}", tok[2], frozenset({op}))
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2],
                                  frozenset({"+", "-", "*", "/", "^", "end of input"}))
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            right = self.term()
            left = BinOp((left.span[0], right.span[1]), op, left, right)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            right = self.unary()
            left = BinOp((left.span[0], right.span[1]), op, left, right)
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            arg = self.unary()
            return arg if tok[1] == "+" else Neg((tok[2], arg.span[1]), arg)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            exp = self.unary()
            return BinOp((base.span[0], exp.span[1]), "^", base, exp)
        return base

    def atom(self) -> Expr:
        kind, text, start, end = self.take()
        if kind == "num":
            return Num((start, end), float(text), text)
        if kind == "name":
            if text == "x":
                return Var((start, end))
            if text == "pi":
                return Pi((start, end))
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                close = self.expect_op(")")
                return Call((start, close[3]), text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", start,
                                         frozenset({"x", "pi", *FUNCTIONS}))
        if kind == "op" and text == "(":
            inner = self.expr()
            close = self.expect_op(")")
            return _respan(inner, (start, close[3]))
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", start, _ATOM_START)


def _respan(e: Expr, span) -> Expr:
    # parentheses widen the span but do not create a node
    return type(e)(span, *[getattr(e, f) for f in e.__dataclass_fields__ if f != "span"])


def parse_expression(src: str) -> Expr:
    """Parse ``src``; raises :class:`ExprSyntaxError` with a character offset."""
    return _Parser(src).parse()


def eval_expr(e: Expr, x):
    """Evaluate at a scalar or a numpy array of ``x`` values."""
    scalar = not isinstance(x, np.ndarray)
    xv = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(e, xv)
    if scalar:
        return float(out)
    return np.broadcast_to(out, xv.shape).astype(float)


def _eval(e: Expr, x):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -_eval(e.arg, x)
    if isinstance(e, Call):
        v = _eval(e.arg, x)
        if e.fn == "sqrt" and np.any(np.asarray(v) < 0):
            raise ExprDomainError("sqrt of a negative number", e.span)
        if e.fn == "csch" and np.any(np.asarray(v) == 0):
            raise ExprDivisionByZero("csch(0)", e.span)
        return FUNCTIONS[e.fn](v)
    if isinstance(e, BinOp):
        a = _eval(e.left, x)
        b = _eval(e.right, x)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if np.any(np.asarray(b) == 0):
                raise ExprDivisionByZero("division by zero", e.span)
            return np.true_divide(a, b)
        if e.op == "^":
            av, bv = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
            if np.any((av < 0) & (bv != np.round(bv))):
                raise ExprDomainError("negative base with non-integer exponent", e.span)
            if np.any((av == 0) & (bv < 0)):
                raise ExprDivisionByZero("zero to a negative power", e.span)
            return np.power(av, bv)
    raise TypeError(f"not an expression node: {e!r}")


def to_source(e: Expr) -> str:
    """Fully parenthesized source text that re-parses to an equivalent expression."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Call):
        return f"{e.fn}({to_source(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    raise TypeError(f"not an expression node: {e!r}")


def uses_pi(e: Expr) -> bool:
    if isinstance(e, Pi):
        return True
    if isinstance(e, Neg):
        return uses_pi(e.arg)
    if isinstance(e, Call):
        return uses_pi(e.arg)
    if isinstance(e, BinOp):
        return uses_pi(e.left) or uses_pi(e.right)
    return False


def _num_exact(e: Num) -> Fraction:
    return Fraction(e.text)


def to_poly(e: Expr, field: str = FLOAT) -> Poly:
    """Convert a polynomial expression in ``x`` to a :class:`Poly`.

    Allowed: numbers, ``pi`` (float field only), ``x``, ``+ - *``, division
    by a constant, and ``^`` with a nonnegative integer constant exponent.
    """
    if isinstance(e, Num):
        return Poly.new([_num_exact(e) if field == EXACT else e.value], field)
    if isinstance(e, Pi):
        if field == EXACT:
            raise ExprEvalError("pi is not rational (use float mode)", e.span)
        return Poly.new([math.pi], field)
    if isinstance(e, Var):
        return Poly.x(field)
    if isinstance(e, Neg):
        return -to_poly(e.arg, field)
    if isinstance(e, BinOp):
        left = to_poly(e.left, field)
        if e.op == "^":
            k = to_poly(e.right, field)
            if k.degree() > 0 or (k.coeffs and (k.coeffs[0] < 0 or k.coeffs[0] != int(k.coeffs[0]))):
                raise ExprEvalError("polynomial exponent must be a nonnegative integer", e.span)
            return left ** int(k.coeffs[0] if k.coeffs else 0)
        right = to_poly(e.right, field)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            if right.degree() != 0:
                raise ExprEvalError("can only divide a polynomial by a nonzero constant", e.span)
            inv = (Fraction(1) / right.coeffs[0]) if field == EXACT else 1.0 / right.coeffs[0]
            return left.scale(inv)
    raise ExprEvalError("not a polynomial expression", e.span)


def eval_constant(e: Expr, exact: bool = True):
    """Evaluate an ``x``-free expression; rational arithmetic when ``exact`` and possible."""
    if exact and not uses_pi(e):
        try:
            p = to_poly(e, EXACT)
        except ExprEvalError:
            p = None
        if p is not None and p.degree() <= 0:
            return p.coeffs[0] if p.coeffs else Fraction(0)
    return eval_expr(e, 0.0) if not _has_var(e) else _raise_var(e)


def _has_var(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, (Neg, Call)):
        return _has_var(e.arg)
    if isinstance(e, BinOp):
        return _has_var(e.left) or _has_var(e.right)
    return False


def _raise_var(e: Expr):
    raise ExprEvalError("constant expected, found a reference to x", e.span)
