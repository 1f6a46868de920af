"""Piecewise expression mini-language for closed-form sequences and matrices.

Grammar::

    document   := piecewise | expr
    piecewise  := piece+                      (one piece must have condition `true`)
    piece      := 'piece' '(' cond ',' expr ')'
    cond       := conj ('or' conj)*
    conj       := catom ('and' catom)*
    catom      := 'true' | 'false' | '(' cond ')' | expr CMP expr
    expr       := term (('+' | '-') term)*
    term       := unary (('*' | '/') unary)*
    unary      := '-' unary | power
    power      := atom ('^' unary)?
    atom       := INTEGER | NAME | '(' expr ')'

``p/q`` with integer literals is exact division, so rational constants are
written as ``1/2``.  Exponents must evaluate to nonnegative integers.

Two evaluators share one tree: :func:`evaluate` (exact, Python ints and
``Fraction``) and :func:`evaluate_array` (vectorised ``float64`` over numpy
index arrays).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

__all__ = [
    "ExprSyntaxError", "EvaluationError",
    "Num", "Var", "Neg", "BinOp", "Compare", "BoolOp", "BoolConst", "Piecewise",
    "parse", "pretty", "evaluate", "evaluate_array", "variables_of",
]

SEQUENCE_VARS = ("k", "l")
MATRIX_VARS = ("m", "n", "k", "l")


class ExprSyntaxError(ValueError):
    """Parse failure at character offset `pos` of the source text."""

    def __init__(self, message, pos, expected=()):
        self.pos = pos
        self.expected = tuple(expected)
        detail = message
        if self.expected:
            detail += " (expected " + ", ".join(repr(e) for e in self.expected) + ")"
        super().__init__(f"{detail} at offset {pos}")


class EvaluationError(ArithmeticError):
    """Raised when a closed form cannot be evaluated at an index."""

    def __init__(self, message, index):
        self.index = tuple(int(i) for i in index)
        super().__init__(f"{message} at index {self.index}")


# --- tree ------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class BoolOp:
    op: str  # 'and' | 'or'
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Piecewise:
    pieces: tuple  # tuple[tuple[Cond, Node], ...]


Node = Union[Num, Var, Neg, BinOp, Piecewise]
Cond = Union[Compare, BoolOp, BoolConst]

# --- lexer -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>==|<=|>=|<|>|[-+*/^(),])
""", re.VERBOSE)

_KEYWORDS = {"piece", "and", "or", "true", "false"}
_CMP = {"==", "<=", "<", ">=", ">"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # num | name | op | kw | end
    text: str
    pos: int


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            word = m.group()
            if kind == "name" and word in _KEYWORDS:
                kind = "kw"
            toks.append(_Tok(kind, word, pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text, variables):
        self.toks = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)

    @property
    def tok(self):
        return self.toks[self.i]

    def accept(self, text):
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            raise ExprSyntaxError(f"unexpected {self._describe()}", self.tok.pos, (text,))

    def _describe(self):
        return "end of input" if self.tok.kind == "end" else repr(self.tok.text)

    def document(self):
        if self.tok.kind == "kw" and self.tok.text == "piece":
            node = self.piecewise()
        else:
            node = self.expr()
        if self.tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self._describe()}", self.tok.pos,
                                  ("end of input",))
        return node

    def piecewise(self):
        start = self.tok.pos
        pieces = []
        while self.tok.kind == "kw" and self.tok.text == "piece":
            self.i += 1
            self.expect("(")
            cond = self.cond()
            self.expect(",")
            body = self.expr()
            self.expect(")")
            pieces.append((cond, body))
        if not any(c == BoolConst(True) for c, _ in pieces):
            raise ExprSyntaxError("piecewise definition needs a default piece(true, ...)",
                                  start)
        return Piecewise(tuple(pieces))

    def cond(self):
        node = self.conj()
        while self.accept("or"):
            node = BoolOp("or", node, self.conj())
        return node

    def conj(self):
        node = self.catom()
        while self.accept("and"):
            node = BoolOp("and", node, self.catom())
        return node

    def catom(self):
        if self.accept("true"):
            return BoolConst(True)
        if self.accept("false"):
            return BoolConst(False)
        if self.tok.text == "(":
            # either a parenthesised condition or an arithmetic operand
            save = self.i
            try:
                self.i += 1
                inner = self.cond()
                self.expect(")")
                if self.tok.text not in _CMP:
                    return inner
            except ExprSyntaxError:
                pass
            self.i = save
        left = self.expr()
        if self.tok.text not in _CMP:
            raise ExprSyntaxError(f"unexpected {self._describe()}", self.tok.pos,
                                  sorted(_CMP))
        op = self.tok.text
        self.i += 1
        return Compare(op, left, self.expr())

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(int(tok.text))
        if tok.kind == "name":
            if tok.text not in self.variables:
                raise ExprSyntaxError(
                    f"unknown variable {tok.text!r}", tok.pos, self.variables)
            self.i += 1
            return Var(tok.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {self._describe()}", tok.pos,
                              ("number", "variable", "("))


def parse(text, variables=SEQUENCE_VARS):
    """Parse `text` into an expression tree over the given variable names."""
    return _Parser(text, variables).document()


def variables_of(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num) or isinstance(node, BoolConst):
        return set()
    if isinstance(node, Neg):
        return variables_of(node.operand)
    if isinstance(node, (BinOp, Compare, BoolOp)):
        return variables_of(node.left) | variables_of(node.right)
    if isinstance(node, Piecewise):
        out = set()
        for c, e in node.pieces:
            out |= variables_of(c) | variables_of(e)
        return out
    raise TypeError(node)


# --- printer ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_BOOL_PREC = {"or": 1, "and": 2}


def _prec(node):
    if isinstance(node, BinOp):
        return 4 if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 5


def _wrap(node, min_prec):
    s = pretty(node)
    return f"({s})" if _prec(node) < min_prec else s


def pretty(node):
    """Render a tree so that ``parse(pretty(t)) == t``."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, 3)
    if isinstance(node, BinOp):
        if node.op == "^":
            return f"{_wrap(node.left, 5)}^{_wrap(node.right, 3)}"
        p = _PREC[node.op]
        return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"
    if isinstance(node, BoolConst):
        return "true" if node.value else "false"
    if isinstance(node, Compare):
        return f"{pretty(node.left)} {node.op} {pretty(node.right)}"
    if isinstance(node, BoolOp):
        p = _BOOL_PREC[node.op]
        left = pretty(node.left)
        right = pretty(node.right)
        if _BOOL_PREC.get(getattr(node.left, "op", None), 3) < p:
            left = f"({left})"
        if _BOOL_PREC.get(getattr(node.right, "op", None), 3) <= p:
            right = f"({right})"
        return f"{left} {node.op} {right}"
    if isinstance(node, Piecewise):
        return " ".join(f"piece({pretty(c)}, {pretty(e)})" for c, e in node.pieces)
    raise TypeError(node)


# --- exact evaluation ------------------------------------------------------

def _norm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v.numerator)
    return v


def _index_of(env):
    return tuple(env[name] for name in ("m", "n", "k", "l") if name in env)


def evaluate(node, env):
    """Exact value of `node` with integer variable bindings `env`."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, BinOp):
        a = evaluate(node.left, env)
        b = evaluate(node.right, env)
        op = node.op
        if op == "+":
            return _norm(a + b)
        if op == "-":
            return _norm(a - b)
        if op == "*":
            return _norm(a * b)
        if op == "/":
            if b == 0:
                raise EvaluationError("division by zero", _index_of(env))
            if isinstance(a, int) and isinstance(b, int):
                return a // b if a % b == 0 else Fraction(a, b)
            return _norm(Fraction(a) / b)
        if op == "^":
            if not (b == int(b) and b >= 0):
                raise EvaluationError(f"exponent {b} is not a nonnegative integer",
                                      _index_of(env))
            return _norm(a ** int(b))
    if isinstance(node, Piecewise):
        for cond, body in node.pieces:
            if _truth(cond, env):
                return evaluate(body, env)
        raise EvaluationError("no piece matched", _index_of(env))
    raise TypeError(node)


def _truth(cond, env):
    if isinstance(cond, BoolConst):
        return cond.value
    if isinstance(cond, BoolOp):
        if cond.op == "and":
            return _truth(cond.left, env) and _truth(cond.right, env)
        return _truth(cond.left, env) or _truth(cond.right, env)
    a = evaluate(cond.left, env)
    b = evaluate(cond.right, env)
    return {"==": a == b, "<=": a <= b, "<": a < b, ">=": a >= b, ">": a > b}[cond.op]


# --- vectorised float evaluation ------------------------------------------

def _first_bad(mask, env):
    idx = np.argwhere(mask)[0]
    point = {}
    for name, arr in env.items():
        a = np.broadcast_to(arr, mask.shape)
        point[name] = int(a[tuple(idx)])
    return _index_of(point)


def evaluate_array(node, env):
    """Evaluate `node` elementwise over broadcastable integer index arrays.

    Returns a float64 array with the broadcast shape of the variables.
    """
    shape = np.broadcast_shapes(*(np.shape(v) for v in env.values()))
    return np.broadcast_to(_arr(node, env, shape), shape).astype(np.float64, copy=True)


def _arr(node, env, shape):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return np.asarray(env[node.name], dtype=np.float64)
    if isinstance(node, Neg):
        return -_arr(node.operand, env, shape)
    if isinstance(node, BinOp):
        a = _arr(node.left, env, shape)
        b = _arr(node.right, env, shape)
        op = node.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            zero = np.broadcast_to(b == 0, shape)
            if zero.any():
                raise EvaluationError("division by zero", _first_bad(zero, env))
            return a / b
        if op == "^":
            bad = np.broadcast_to((b < 0) | (b != np.floor(b)), shape)
            if bad.any():
                raise EvaluationError("exponent is not a nonnegative integer",
                                      _first_bad(bad, env))
            with np.errstate(over="ignore"):
                return np.power(a, b)
    if isinstance(node, Piecewise):
        out = np.zeros(shape, dtype=np.float64)
        remaining = np.ones(shape, dtype=bool)
        full = {name: np.broadcast_to(v, shape) for name, v in env.items()}
        for cond, body in node.pieces:
            hit = remaining & np.broadcast_to(_cond_arr(cond, env, shape), shape)
            if hit.any():
                sub = {name: v[hit] for name, v in full.items()}
                out[hit] = np.broadcast_to(_arr(body, sub, (int(hit.sum()),)),
                                           (int(hit.sum()),))
            remaining &= ~hit
            if not remaining.any():
                break
        return out
    raise TypeError(node)


def _cond_arr(cond, env, shape):
    if isinstance(cond, BoolConst):
        return np.full(shape, cond.value)
    if isinstance(cond, BoolOp):
        a = _cond_arr(cond.left, env, shape)
        b = _cond_arr(cond.right, env, shape)
        return (a & b) if cond.op == "and" else (a | b)
    a = _arr(cond.left, env, shape)
    b = _arr(cond.right, env, shape)
    return {"==": np.equal, "<=": np.less_equal, "<": np.less,
            ">=": np.greater_equal, ">": np.greater}[cond.op](a, b)
