"""Arithmetic expressions for coefficient functions in configuration files.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = primary [ "^" unary ] ;
    primary = number | constant | variable | call | "(" expr ")" ;
    call    = function "(" expr ")" ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
            | "." digits [ exponent ] ;

``^`` is right-associative and binds tighter than unary minus, so
``-2^2`` is ``-4`` and ``2^-t`` is ``2^(-t)``. Constants are ``pi`` and
``e``; variables are drawn from ``t, y, x, q``; functions are ``exp, ln,
sin, cos, sqrt, abs, gamma``.

Evaluation is vectorized over numpy arrays. Division by zero, ``ln`` of a
non-positive number, ``sqrt`` of a negative number, a negative base with a
non-integer exponent and ``gamma`` at a pole raise :class:`DomainError`
carrying the byte offset of the offending node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PsiHilferError
from .special import gamma as _gamma

__all__ = [
    "Expr",
    "parse",
    "ExprError",
    "ExprSyntaxError",
    "UnknownIdentifier",
    "ArityError",
    "UnboundVariable",
    "DomainError",
    "VARIABLES",
    "FUNCTIONS",
]

VARIABLES = ("t", "y", "x", "q")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = ("exp", "ln", "sin", "cos", "sqrt", "abs", "gamma")


class ExprError(PsiHilferError, ValueError):
    """Base class for expression errors; ``offset`` is a byte offset."""

    def __init__(self, message: str, offset: int | None = None, source: str = ""):
        self.offset = offset
        self.source = source
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}")


class ExprSyntaxError(ExprError):
    def __init__(self, message, offset, source="", expected=()):
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message}; expected one of {', '.join(self.expected)}"
        super().__init__(message, offset, source)


class UnknownIdentifier(ExprError):
    pass


class ArityError(ExprError):
    pass


class UnboundVariable(ExprError):
    pass


class DomainError(ExprError, ArithmeticError):
    pass


# syntax tree

@dataclass(frozen=True)
class Num:
    value: float
    text: str
    pos: int


@dataclass(frozen=True)
class Var:
    name: str
    pos: int


@dataclass(frozen=True)
class Const:
    name: str
    pos: int


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: int


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object
    pos: int


@dataclass(frozen=True)
class Call:
    name: str
    arg: object
    pos: int


# tokenizer

@dataclass(frozen=True)
class _Tok:
    kind: str  # num, ident, op, end
    text: str
    pos: int  # byte offset


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    i, n = 0, len(src)
    byte = 0

    def bpos(k):
        return byte + len(src[i:k].encode("utf-8"))

    while i < n:
        c = src[i]
        if c.isspace():
            byte += len(c.encode("utf-8"))
            i += 1
            continue
        j = i
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            while j < n and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isdigit():
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    while k < n and src[k].isdigit():
                        k += 1
                    j = k
            toks.append(_Tok("num", src[i:j], byte))
        elif c.isalpha() or c == "_":
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("ident", src[i:j], byte))
        elif c in "+-*/^(),":
            j = i + 1
            toks.append(_Tok("op", c, byte))
        else:
            raise ExprSyntaxError(f"unexpected character {c!r}", byte, src)
        byte = bpos(j)
        i = j
    toks.append(_Tok("end", "", byte))
    return toks


_PRIMARY_START = ("number", "identifier", "'('")


class _Parser:
    def __init__(self, src: str, variables):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.variables = tuple(variables)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _is(self, text):
        return self.tok.kind == "op" and self.tok.text == text

    def _fail(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"unexpected {what}", tok.pos, self.src, expected)

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            self._fail(("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return node

    def expr(self):
        node = self.term()
        while self._is("+") or self._is("-"):
            tok = self.tok
            self.i += 1
            node = Bin(tok.text, node, self.term(), tok.pos)
        return node

    def term(self):
        node = self.unary()
        while self._is("*") or self._is("/"):
            tok = self.tok
            self.i += 1
            node = Bin(tok.text, node, self.unary(), tok.pos)
        return node

    def unary(self):
        if self._is("-"):
            tok = self.tok
            self.i += 1
            return Neg(self.unary(), tok.pos)
        return self.power()

    def power(self):
        base = self.primary()
        if self._is("^"):
            tok = self.tok
            self.i += 1
            return Bin("^", base, self.unary(), tok.pos)
        return base

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text), tok.text, tok.pos)
        if tok.kind == "ident":
            self.i += 1
            name = tok.text
            if self._is("("):
                if name not in FUNCTIONS:
                    raise UnknownIdentifier(f"unknown function {name!r}", tok.pos, self.src)
                self.i += 1
                args = [self.expr()]
                while self._is(","):
                    self.i += 1
                    args.append(self.expr())
                if not self._is(")"):
                    self._fail(("')'", "','"))
                self.i += 1
                if len(args) != 1:
                    raise ArityError(
                        f"{name} takes 1 argument, got {len(args)}", tok.pos, self.src
                    )
                return Call(name, args[0], tok.pos)
            if name in FUNCTIONS:
                self._fail(("'('",))
            if name in CONSTANTS:
                return Const(name, tok.pos)
            if name in self.variables:
                return Var(name, tok.pos)
            raise UnknownIdentifier(
                f"unknown identifier {name!r} (allowed variables: {', '.join(self.variables)})",
                tok.pos,
                self.src,
            )
        if self._is("("):
            self.i += 1
            node = self.expr()
            if not self._is(")"):
                self._fail(("')'", "'+'", "'-'", "'*'", "'/'", "'^'"))
            self.i += 1
            return node
        self._fail(_PRIMARY_START + ("'-'",))


# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node) -> int:
    if isinstance(node, Bin):
        return 4 if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def _fmt(node) -> str:
    if isinstance(node, Num):
        return node.text
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({_fmt(node.arg)})"
    if isinstance(node, Neg):
        inner = _fmt(node.operand)
        return f"-({inner})" if _prec(node.operand) < 3 else f"-{inner}"
    left, right = _fmt(node.left), _fmt(node.right)
    if node.op == "^":
        if _prec(node.left) < 5:
            left = f"({left})"
        if _prec(node.right) < 3:
            right = f"({right})"
        return f"{left}^{right}"
    p = _PREC[node.op]
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    if p == 1:
        return f"{left} {node.op} {right}"
    return f"{left}*{right}" if node.op == "*" else f"{left}/{right}"


# evaluation

def _walk(node):
    yield node
    if isinstance(node, Bin):
        yield from _walk(node.left)
        yield from _walk(node.right)
    elif isinstance(node, (Neg,)):
        yield from _walk(node.operand)
    elif isinstance(node, Call):
        yield from _walk(node.arg)


_gamma_vec = np.vectorize(lambda z: _gamma(float(z)), otypes=[float])


class _Evaluator:
    def __init__(self, expr: "Expr", env, zero_over_zero):
        self.expr = expr
        self.env = env
        self.zero_over_zero = zero_over_zero

    def domain(self, message, node):
        raise DomainError(message, node.pos, self.expr.source)

    def run(self, node):
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Const):
            return CONSTANTS[node.name]
        if isinstance(node, Var):
            return self.env[node.name]
        if isinstance(node, Neg):
            return -self.run(node.operand)
        if isinstance(node, Call):
            return self.call(node, self.run(node.arg))
        a, b = self.run(node.left), self.run(node.right)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return self.divide(node, a, b)
        return self.power(node, a, b)

    def divide(self, node, a, b):
        zero = np.asarray(b) == 0
        if not np.any(zero):
            return a / b
        if self.zero_over_zero == "zero":
            num_zero = np.broadcast_to(np.asarray(a) == 0, np.broadcast(a, b).shape)
            zero_b = np.broadcast_to(zero, num_zero.shape)
            if np.all(num_zero[zero_b]):
                safe = np.where(zero_b, 1.0, b)
                out = np.where(zero_b, 0.0, np.asarray(a) / safe)
                return out if out.ndim else float(out)
        self.domain("division by zero", node)

    def power(self, node, a, b):
        arr_a, arr_b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        a_b, b_b = np.broadcast_arrays(arr_a, arr_b)
        bad = (a_b < 0) & (b_b != np.round(b_b))
        if np.any(bad):
            self.domain("negative base with non-integer exponent", node)
        if np.any((a_b == 0) & (b_b < 0)):
            self.domain("division by zero (zero to a negative power)", node)
        out = np.power(arr_a, b)
        return out if np.ndim(out) else float(out)

    def call(self, node, v):
        arr = np.asarray(v, dtype=float)
        name = node.name
        if name == "ln":
            if np.any(arr <= 0):
                self.domain("ln of a non-positive number", node)
            out = np.log(arr)
        elif name == "sqrt":
            if np.any(arr < 0):
                self.domain("sqrt of a negative number", node)
            out = np.sqrt(arr)
        elif name == "gamma":
            if np.any((arr <= 0) & (arr == np.round(arr))):
                self.domain("gamma at a non-positive integer", node)
            out = _gamma_vec(arr)
        else:
            out = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs}[name](arr)
        return out if np.ndim(out) else float(out)


class Expr:
    """A parsed expression.

    Instances are immutable and may be shared and evaluated concurrently.
    """

    __slots__ = ("root", "source", "variables")

    def __init__(self, root, source: str, allowed=VARIABLES):
        self.root = root
        self.source = source
        self.variables = tuple(sorted({n.name for n in _walk(root) if isinstance(n, Var)}))

    def __repr__(self):
        return f"Expr({self.pretty()!r})"

    def pretty(self) -> str:
        """Canonical text; parsing it gives an equivalent tree."""
        return _fmt(self.root)

    def eval(self, bindings: dict | None = None, zero_over_zero: str = "error", **kw):
        """Evaluate with variables bound to scalars or arrays.

        Parameters
        ----------
        bindings : dict
            Values for the variables; keyword arguments are merged in.
        zero_over_zero : {"error", "zero"}
            How ``0/0`` is handled; any other division by zero is always
            an error.

        Raises
        ------
        UnboundVariable, DomainError
        """
        env = dict(bindings or {})
        env.update(kw)
        for name in self.variables:
            if name not in env:
                raise UnboundVariable(f"variable {name!r} is not bound", None, self.source)
        if zero_over_zero not in ("error", "zero"):
            raise ValueError(f"unknown zero_over_zero policy {zero_over_zero!r}")
        env = {k: (np.asarray(v, dtype=float) if np.ndim(v) else float(v)) for k, v in env.items()}
        with np.errstate(all="ignore"):
            return _Evaluator(self, env, zero_over_zero).run(self.root)

    def as_function(self, argnames, zero_over_zero: str = "error"):
        """Callable taking positional arrays in the order ``argnames``."""
        names = tuple(argnames)
        missing = set(self.variables) - set(names)
        if missing:
            raise UnboundVariable(
                f"expression uses {', '.join(sorted(missing))} but only {', '.join(names)} are provided",
                None,
                self.source,
            )

        def f(*args):
            return self.eval(dict(zip(names, args)), zero_over_zero=zero_over_zero)

        f.__name__ = "expr"
        f.expr = self
        return f


def parse(source: str, variables=VARIABLES) -> Expr:
    """Parse ``source`` into an :class:`Expr`.

    Examples
    --------
    >>> parse("2+3*4^2").eval()
    50.0
    >>> parse("-2^2").eval()
    -4.0

    Raises
    ------
    ExprSyntaxError
        With the byte offset of the failure and the set of tokens that
        would have been accepted there.
    UnknownIdentifier, ArityError
    """
    return Expr(_Parser(source, variables).parse(), source, variables)
