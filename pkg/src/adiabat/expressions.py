"""Closed-form equation-of-state expressions: parsing, evaluation, derivatives.

Grammar (right-associative ``^``, unary minus binding looser than ``^``)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := base ('^' factor)?
    base   := number | name | name '(' expr ')' | '(' expr ')'

Variables are ``theta`` and ``v``; every other name is a constant that must be
bound at evaluation time.  The only functions are ``exp`` and ``ln``.
Expressions are immutable after parsing and evaluation is pure, so parsed
trees may be shared freely across threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .errors import (
    DomainError,
    ExprSyntaxError,
    MissingBindingError,
    UnknownFunctionError,
)

VARIABLES = frozenset({"theta", "v"})
FUNCTIONS = frozenset({"exp", "ln"})

Bindings = Mapping[str, float]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str  # exp or ln
    arg: "Expr"


Expr = Union[Num, Name, Neg, Bin, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            # only whitespace may remain; anything else is a lex error
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def _peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _last_pos(self) -> int:
        if self.i == 0:
            return 0
        return self.tokens[self.i - 1][2]

    def _advance(self) -> tuple[str, str, int]:
        tok = self._peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", self._last_pos())
        self.i += 1
        return tok

    def _expect_op(self, op: str) -> None:
        tok = self._peek()
        if tok is None:
            raise ExprSyntaxError(f"expected {op!r}", self._last_pos())
        if tok[0] != "op" or tok[1] != op:
            raise ExprSyntaxError(f"expected {op!r}", tok[2])
        self.i += 1

    def parse(self) -> Expr:
        if not self.tokens:
            raise ExprSyntaxError("empty expression", 0)
        e = self.expr()
        tok = self._peek()
        if tok is not None:
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Expr:
        e = self.term()
        while (tok := self._peek()) is not None and tok[0] == "op" and tok[1] in "+-":
            self.i += 1
            e = Bin(tok[1], e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while (tok := self._peek()) is not None and tok[0] == "op" and tok[1] in "*/":
            self.i += 1
            e = Bin(tok[1], e, self.factor())
        return e

    def factor(self) -> Expr:
        tok = self._peek()
        if tok is not None and tok[0] == "op" and tok[1] == "-":
            self.i += 1
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        e = self.base()
        tok = self._peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.i += 1
            e = Bin("^", e, self.factor())
        return e

    def base(self) -> Expr:
        kind, text, pos = self._advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            nxt = self._peek()
            if nxt is not None and nxt[0] == "op" and nxt[1] == "(":
                if text not in FUNCTIONS:
                    raise UnknownFunctionError(f"unknown function {text!r}", pos)
                self.i += 1
                arg = self.expr()
                self._expect_op(")")
                return Call(text, arg)
            return Name(text)
        if kind == "op" and text == "(":
            e = self.expr()
            self._expect_op(")")
            return e
        raise ExprSyntaxError(f"unexpected token {text!r}", pos)


def parse(text: str) -> Expr:
    """Parse expression text into an immutable AST.

    Raises ExprSyntaxError (with byte offset) on malformed input and
    UnknownFunctionError when a name other than exp/ln is called.
    """
    return _Parser(text).parse()


def free_names(e: Expr) -> frozenset[str]:
    """All names referenced by the expression, variables included."""
    if isinstance(e, Num):
        return frozenset()
    if isinstance(e, Name):
        return frozenset({e.ident})
    if isinstance(e, Neg):
        return free_names(e.arg)
    if isinstance(e, Call):
        return free_names(e.arg)
    return free_names(e.left) | free_names(e.right)


def _check_finite(x: float) -> float:
    if not math.isfinite(x):
        raise DomainError(f"non-finite value {x!r}")
    return x


def evaluate(e: Expr, bindings: Bindings) -> float:
    """IEEE double evaluation of the tree under the given bindings.

    Raises MissingBindingError for unbound names and DomainError for ln of a
    non-positive argument, division by zero, invalid powers, or overflow.
    """
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Name):
        try:
            return float(bindings[e.ident])
        except KeyError:
            raise MissingBindingError(f"no binding for {e.ident!r}") from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, bindings)
    if isinstance(e, Call):
        x = evaluate(e.arg, bindings)
        if e.fn == "ln":
            if x <= 0.0:
                raise DomainError(f"ln of non-positive value {x!r}")
            return math.log(x)
        try:
            return _check_finite(math.exp(x))
        except OverflowError:
            raise DomainError(f"exp overflow at {x!r}") from None
    left = evaluate(e.left, bindings)
    right = evaluate(e.right, bindings)
    op = e.op
    try:
        if op == "+":
            return _check_finite(left + right)
        if op == "-":
            return _check_finite(left - right)
        if op == "*":
            return _check_finite(left * right)
        if op == "/":
            if right == 0.0:
                raise DomainError("division by zero")
            return _check_finite(left / right)
        return _check_finite(left**right)
    except OverflowError:
        raise DomainError(f"overflow in {op!r}") from None
    except ZeroDivisionError:
        raise DomainError("zero raised to a negative power") from None
    except ValueError:
        raise DomainError(f"invalid power base {left!r} exponent {right!r}") from None


def _is_num(e: Expr, value: float | None = None) -> bool:
    return isinstance(e, Num) and (value is None or e.value == value)


def fold(e: Expr) -> Expr:
    """Constant folding plus the neutral/absorbing-element identities.

    No CAS-style rewriting: evaluation semantics on valid bindings are
    preserved exactly; the tree shape is otherwise unspecified.
    """
    if isinstance(e, (Num, Name)):
        return e
    if isinstance(e, Neg):
        a = fold(e.arg)
        if isinstance(a, Num):
            return Num(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(e, Call):
        a = fold(e.arg)
        if isinstance(a, Num):
            try:
                return Num(evaluate(Call(e.fn, a), {}))
            except DomainError:
                return Call(e.fn, a)
        return Call(e.fn, a)
    left, right = fold(e.left), fold(e.right)
    op = e.op
    if isinstance(left, Num) and isinstance(right, Num):
        try:
            return Num(evaluate(Bin(op, left, right), {}))
        except DomainError:
            return Bin(op, left, right)
    if op == "+":
        if _is_num(left, 0.0):
            return right
        if _is_num(right, 0.0):
            return left
    elif op == "-":
        if _is_num(right, 0.0):
            return left
        if _is_num(left, 0.0):
            return Neg(right)
    elif op == "*":
        if _is_num(left, 0.0) or _is_num(right, 0.0):
            return Num(0.0)
        if _is_num(left, 1.0):
            return right
        if _is_num(right, 1.0):
            return left
    elif op == "/":
        if _is_num(right, 1.0):
            return left
    elif op == "^":
        if _is_num(right, 1.0):
            return left
        if _is_num(right, 0.0):
            return Num(1.0)
    return Bin(op, left, right)


def _depends_on(e: Expr, var: str) -> bool:
    return var in free_names(e)


def _d(e: Expr, var: str) -> Expr:
    if isinstance(e, Num):
        return Num(0.0)
    if isinstance(e, Name):
        return Num(1.0) if e.ident == var else Num(0.0)
    if isinstance(e, Neg):
        return Neg(_d(e.arg, var))
    if isinstance(e, Call):
        du = _d(e.arg, var)
        if e.fn == "exp":
            return Bin("*", Call("exp", e.arg), du)
        return Bin("/", du, e.arg)
    l, r, op = e.left, e.right, e.op
    dl, dr = _d(l, var), _d(r, var)
    if op in "+-":
        return Bin(op, dl, dr)
    if op == "*":
        return Bin("+", Bin("*", dl, r), Bin("*", l, dr))
    if op == "/":
        return Bin("/", Bin("-", Bin("*", dl, r), Bin("*", l, dr)), Bin("^", r, Num(2.0)))
    # power: split on exponent dependence so u^w with constant w never
    # introduces ln(u), which would shrink the valid domain
    if not _depends_on(r, var):
        term = Bin("*", r, Bin("^", l, Bin("-", r, Num(1.0))))
        return Bin("*", term, dl)
    if not _depends_on(l, var):
        return Bin("*", Bin("*", Bin("^", l, r), Call("ln", l)), dr)
    inner = Bin("+", Bin("*", dr, Call("ln", l)), Bin("/", Bin("*", r, dl), l))
    return Bin("*", Bin("^", l, r), inner)


def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic partial derivative with respect to ``theta`` or ``v``.

    Named constants differentiate to zero.  The result is constant-folded
    but carries no canonical-form guarantee.
    """
    if var not in VARIABLES:
        raise ValueError(f"derivative variable must be one of {sorted(VARIABLES)}, got {var!r}")
    return fold(_d(e, var))


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}
_NEG_PREC = 1.5  # looser than ^, tighter than * (prints unambiguously)


def to_string(e: Expr) -> str:
    """Render the tree as parseable text; parse(to_string(e)) evaluates like e."""

    def render(node: Expr, ctx: float) -> str:
        if isinstance(node, Num):
            if node.value < 0 or (node.value == 0 and math.copysign(1.0, node.value) < 0):
                return _wrap(f"-{_fmt(-node.value)}", _NEG_PREC, ctx)
            return _fmt(node.value)
        if isinstance(node, Name):
            return node.ident
        if isinstance(node, Call):
            return f"{node.fn}({render(node.arg, 0)})"
        if isinstance(node, Neg):
            return _wrap(f"-{render(node.arg, _NEG_PREC)}", _NEG_PREC, ctx)
        prec = _PREC[node.op]
        if node.op == "^":
            left = render(node.left, prec + 0.5)  # ^ is right-associative
            right = render(node.right, prec - 0.5)
        else:
            left = render(node.left, prec)
            right = render(node.right, prec + 0.5)  # left-associative chain
        return _wrap(f"{left} {node.op} {right}", prec, ctx)

    def _wrap(text: str, prec: float, ctx: float) -> str:
        return f"({text})" if prec < ctx else text

    def _fmt(x: float) -> str:
        return repr(x)

    return render(e, 0)


def compile_fn(e: Expr, constants: Bindings) -> Callable[[float, float], float]:
    """Compile the tree to a plain ``f(theta, v)`` with constants inlined.

    This is the hot path used by quadrature and ODE right-hand sides; it
    matches :func:`evaluate` bit-for-bit on shared operations but raises the
    underlying ValueError/ZeroDivisionError/OverflowError instead of
    DomainError.  Unknown names fail here, at compile time.
    """

    def emit(node: Expr) -> str:
        if isinstance(node, Num):
            return f"({node.value!r})"
        if isinstance(node, Name):
            if node.ident in VARIABLES:
                return node.ident
            try:
                return f"({float(constants[node.ident])!r})"
            except KeyError:
                raise MissingBindingError(f"no binding for constant {node.ident!r}") from None
        if isinstance(node, Neg):
            return f"(-{emit(node.arg)})"
        if isinstance(node, Call):
            fn = "exp" if node.fn == "exp" else "log"
            return f"{fn}({emit(node.arg)})"
        op = "**" if node.op == "^" else node.op
        return f"({emit(node.left)} {op} {emit(node.right)})"

    source = f"lambda theta, v: {emit(e)}"
    return eval(source, {"exp": math.exp, "log": math.log})  # noqa: S307 - our own AST
