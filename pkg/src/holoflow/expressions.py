"""Expression trees for analytic maps.

Maps are built from a small closed grammar (used verbatim by the CLI and
the JSON interchange formats):

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ['^' integer]
    atom   := 'z' | complex-literal | 'exp' '(' expr ')' | '(' expr ')'

Complex literals are written ``a+bi`` (``0.5``, ``2i``, ``1+0.5i``, ...).
The optional leading sign is the only unary minus the grammar admits.
Composition of two maps has no surface syntax; it is produced
programmatically with :meth:`AnalyticMap.compose` and substitutes one
tree into the variable of the other.

Derivatives are symbolic (the grammar is closed under differentiation),
so derivative evaluation carries no finite-difference noise.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionParseError

DOMAINS = ("disc", "half-plane", "plane")


# --------------------------------------------------------------------------
# tree nodes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Z:
    pass


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Exp:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


def simplify(node):
    """Light constant folding; keeps derivative trees small."""
    if isinstance(node, (Const, Z)):
        return node
    if isinstance(node, Neg):
        a = simplify(node.arg)
        if isinstance(a, Const):
            return Const(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(node, Exp):
        a = simplify(node.arg)
        if isinstance(a, Const):
            return Const(np.exp(a.value))
        return Exp(a)
    if isinstance(node, Pow):
        b = simplify(node.base)
        if node.exponent == 0:
            return Const(1.0 + 0j)
        if node.exponent == 1:
            return b
        if isinstance(b, Const):
            return Const(b.value ** node.exponent)
        return Pow(b, node.exponent)

    a = simplify(node.left)
    b = simplify(node.right)
    ca = a.value if isinstance(a, Const) else None
    cb = b.value if isinstance(b, Const) else None
    if isinstance(node, Add):
        if ca == 0:
            return b
        if cb == 0:
            return a
        if ca is not None and cb is not None:
            return Const(ca + cb)
        return Add(a, b)
    if isinstance(node, Sub):
        if cb == 0:
            return a
        if ca == 0:
            return Neg(b)
        if ca is not None and cb is not None:
            return Const(ca - cb)
        return Sub(a, b)
    if isinstance(node, Mul):
        if ca == 0 or cb == 0:
            return Const(0j)
        if ca == 1:
            return b
        if cb == 1:
            return a
        if ca is not None and cb is not None:
            return Const(ca * cb)
        return Mul(a, b)
    if isinstance(node, Div):
        if cb == 1:
            return a
        if ca == 0:
            return Const(0j)
        if ca is not None and cb is not None and cb != 0:
            return Const(ca / cb)
        return Div(a, b)
    raise TypeError(f"unknown node {node!r}")


def differentiate(node):
    if isinstance(node, Const):
        return Const(0j)
    if isinstance(node, Z):
        return Const(1.0 + 0j)
    if isinstance(node, Add):
        return Add(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Sub):
        return Sub(differentiate(node.left), differentiate(node.right))
    if isinstance(node, Mul):
        return Add(
            Mul(differentiate(node.left), node.right),
            Mul(node.left, differentiate(node.right)),
        )
    if isinstance(node, Div):
        num = Sub(
            Mul(differentiate(node.left), node.right),
            Mul(node.left, differentiate(node.right)),
        )
        return Div(num, Pow(node.right, 2))
    if isinstance(node, Neg):
        return Neg(differentiate(node.arg))
    if isinstance(node, Exp):
        return Mul(Exp(node.arg), differentiate(node.arg))
    if isinstance(node, Pow):
        inner = Mul(Const(complex(node.exponent)), Pow(node.base, node.exponent - 1))
        return Mul(inner, differentiate(node.base))
    raise TypeError(f"unknown node {node!r}")


def substitute(node, replacement):
    """Replace the variable with another tree (composition)."""
    if isinstance(node, Z):
        return replacement
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, replacement))
    if isinstance(node, Exp):
        return Exp(substitute(node.arg, replacement))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, replacement), node.exponent)
    cls = type(node)
    return cls(substitute(node.left, replacement), substitute(node.right, replacement))


# --------------------------------------------------------------------------
# printing (round-trips through the grammar)
# --------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    return repr(float(x))


def _fmt_complex(c: complex) -> str:
    re_, im_ = c.real, c.imag
    if im_ == 0:
        if re_ < 0:
            return f"({_fmt_float(re_)})"
        return _fmt_float(re_)
    if re_ == 0:
        return f"({_fmt_float(im_)}i)"
    sign = "+" if im_ >= 0 else "-"
    return f"({_fmt_float(re_)}{sign}{_fmt_float(abs(im_))}i)"


_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Pow: 3}


def to_expr(node) -> str:
    return _print(node, 0)


def _print(node, parent_prec):
    if isinstance(node, Const):
        return _fmt_complex(node.value)
    if isinstance(node, Z):
        return "z"
    if isinstance(node, Exp):
        return f"exp({_print(node.arg, 0)})"
    if isinstance(node, Neg):
        # valid only at the head of an expression, so always parenthesize
        return f"(-{_print(node.arg, 1)})"
    if isinstance(node, Pow):
        base = _print(node.base, 3)
        if not isinstance(node.base, (Z, Exp)):
            base = f"({_print(node.base, 0)})"
        return f"{base}^{node.exponent}"
    prec = _PREC[type(node)]
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(node)]
    left = _print(node.left, prec - 1)
    right = _print(node.right, prec)  # wrap right operand of -, / at equal prec
    s = f"{left}{op}{right}"
    if prec <= parent_prec:
        return f"({s})"
    return s


# --------------------------------------------------------------------------
# parsing
# --------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?(i?)")
_TOKEN_SPEC = [
    ("NUM", _NUMBER_RE),
    ("NAME", re.compile(r"[A-Za-z_]+")),
    ("OP", re.compile(r"[-+*/^()]")),
]


class _Token:
    __slots__ = ("kind", "text", "value", "line", "col")

    def __init__(self, kind, text, value, line, col):
        self.kind = kind
        self.text = text
        self.value = value
        self.line = line
        self.col = col


def _tokenize(text):
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        for kind, rx in _TOKEN_SPEC:
            m = rx.match(text, i)
            if m:
                tok_text = m.group(0)
                if kind == "NUM":
                    mag = float(m.group(1) + (m.group(2) or ""))
                    value = complex(0.0, mag) if m.group(3) else complex(mag, 0.0)
                    tokens.append(_Token("NUM", tok_text, value, line, col))
                elif kind == "NAME":
                    if tok_text == "z":
                        tokens.append(_Token("Z", tok_text, None, line, col))
                    elif tok_text == "exp":
                        tokens.append(_Token("EXP", tok_text, None, line, col))
                    else:
                        raise ExpressionParseError(
                            f"unknown name {tok_text!r}", line, col
                        )
                else:
                    tokens.append(_Token(tok_text, tok_text, None, line, col))
                col += len(tok_text)
                i = m.end()
                break
        else:
            raise ExpressionParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("END", "", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.peek()
        if tok.kind != kind:
            raise ExpressionParseError(
                f"expected {kind!r}, got {tok.text!r}", tok.line, tok.col
            )
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "END":
            raise ExpressionParseError(
                f"trailing input {tok.text!r}", tok.line, tok.col
            )
        return node

    def expr(self):
        negate = False
        if self.peek().kind in ("+", "-"):
            negate = self.advance().kind == "-"
        node = self.term()
        if negate:
            node = Neg(node)
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        node = self.atom()
        if self.peek().kind == "^":
            self.advance()
            sign = 1
            if self.peek().kind in ("+", "-"):
                if self.advance().kind == "-":
                    sign = -1
            tok = self.expect("NUM")
            if tok.value.imag != 0 or tok.value.real != int(tok.value.real):
                raise ExpressionParseError(
                    "integer exponent expected", tok.line, tok.col
                )
            node = Pow(node, sign * int(tok.value.real))
        return node

    def atom(self):
        tok = self.peek()
        if tok.kind == "Z":
            self.advance()
            return Z()
        if tok.kind == "NUM":
            self.advance()
            return Const(tok.value)
        if tok.kind == "EXP":
            self.advance()
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            return Exp(inner)
        if tok.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExpressionParseError(
            f"expected atom, got {tok.text or 'end of input'!r}", tok.line, tok.col
        )


def parse_expr(text: str):
    """Parse expression text into a tree."""
    return _Parser(_tokenize(text)).parse()


# --------------------------------------------------------------------------
# tape compilation (consumed by the kernels)
# --------------------------------------------------------------------------

OP_Z, OP_CONST, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_NEG, OP_EXP, OP_POW = range(9)


@dataclass
class Tape:
    """Postfix instruction tape for the stack-machine kernels."""

    ops: np.ndarray       # int32 opcodes
    args: np.ndarray      # int32 (const index or integer exponent)
    consts: np.ndarray    # complex128 pool
    stack_need: int


def compile_tape(node) -> Tape:
    ops, args, consts = [], [], []

    def emit(n):
        if isinstance(n, Z):
            ops.append(OP_Z)
            args.append(0)
            return 1
        if isinstance(n, Const):
            ops.append(OP_CONST)
            args.append(len(consts))
            consts.append(complex(n.value))
            return 1
        if isinstance(n, Neg):
            d = emit(n.arg)
            ops.append(OP_NEG)
            args.append(0)
            return d
        if isinstance(n, Exp):
            d = emit(n.arg)
            ops.append(OP_EXP)
            args.append(0)
            return d
        if isinstance(n, Pow):
            d = emit(n.base)
            ops.append(OP_POW)
            args.append(n.exponent)
            return d
        da = emit(n.left)
        db = emit(n.right)
        code = {Add: OP_ADD, Sub: OP_SUB, Mul: OP_MUL, Div: OP_DIV}[type(n)]
        ops.append(code)
        args.append(0)
        return max(da, db + 1)

    depth = emit(node)
    return Tape(
        np.asarray(ops, dtype=np.int32),
        np.asarray(args, dtype=np.int32),
        np.asarray(consts if consts else [0j], dtype=np.complex128),
        depth,
    )


# --------------------------------------------------------------------------
# public map type
# --------------------------------------------------------------------------

class AnalyticMap:
    """Evaluable analytic map with exact derivative and a domain tag.

    Immutable by convention: all combinators return new instances, so
    instances are safe to share between threads.
    """

    __slots__ = ("node", "domain", "_tape", "_derivative")

    def __init__(self, node, domain="disc"):
        if domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}")
        self.node = node
        self.domain = domain
        self._tape = None
        self._derivative = None

    # -- construction -----------------------------------------------------

    @classmethod
    def parse(cls, text: str, domain: str = "disc") -> "AnalyticMap":
        return cls(parse_expr(text), domain)

    @classmethod
    def identity(cls, domain: str = "disc") -> "AnalyticMap":
        return cls(Z(), domain)

    @classmethod
    def constant(cls, value, domain: str = "disc") -> "AnalyticMap":
        return cls(Const(complex(value)), domain)

    def _as_node(self, other):
        if isinstance(other, AnalyticMap):
            return other.node
        return Const(complex(other))

    def __add__(self, other):
        return AnalyticMap(Add(self.node, self._as_node(other)), self.domain)

    def __radd__(self, other):
        return AnalyticMap(Add(self._as_node(other), self.node), self.domain)

    def __sub__(self, other):
        return AnalyticMap(Sub(self.node, self._as_node(other)), self.domain)

    def __rsub__(self, other):
        return AnalyticMap(Sub(self._as_node(other), self.node), self.domain)

    def __mul__(self, other):
        return AnalyticMap(Mul(self.node, self._as_node(other)), self.domain)

    def __rmul__(self, other):
        return AnalyticMap(Mul(self._as_node(other), self.node), self.domain)

    def __truediv__(self, other):
        return AnalyticMap(Div(self.node, self._as_node(other)), self.domain)

    def __rtruediv__(self, other):
        return AnalyticMap(Div(self._as_node(other), self.node), self.domain)

    def __neg__(self):
        return AnalyticMap(Neg(self.node), self.domain)

    def __pow__(self, n: int):
        return AnalyticMap(Pow(self.node, int(n)), self.domain)

    def compose(self, inner: "AnalyticMap") -> "AnalyticMap":
        """self after inner; the result lives on inner's domain."""
        return AnalyticMap(substitute(self.node, inner.node), inner.domain)

    def with_domain(self, domain: str) -> "AnalyticMap":
        return AnalyticMap(self.node, domain)

    # -- evaluation -------------------------------------------------------

    @property
    def tape(self) -> Tape:
        if self._tape is None:
            self._tape = compile_tape(simplify(self.node))
        return self._tape

    def __call__(self, z):
        from . import _kernels as K

        if isinstance(z, np.ndarray):
            return K.eval_many(self.tape, np.ascontiguousarray(z, dtype=np.complex128))
        return K.eval_one(self.tape, complex(z))

    def derivative(self) -> "AnalyticMap":
        if self._derivative is None:
            self._derivative = AnalyticMap(
                simplify(differentiate(self.node)), self.domain
            )
        return self._derivative

    # -- interchange ------------------------------------------------------

    def to_expr(self) -> str:
        return to_expr(simplify(self.node))

    def __repr__(self):
        return f"AnalyticMap({self.to_expr()!r}, domain={self.domain!r})"
