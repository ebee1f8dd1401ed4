"""Arithmetic expression parser and evaluator for planar test fields.

Grammar: variables x and y, float literals, the constant pi, operators
+ - * / ^ (with ^ right-associative and binding tighter than unary minus),
parentheses, and the functions sin, cos, exp, abs, sign.  No implicit
multiplication; identifiers are case-sensitive.
"""

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Num",
    "Var",
    "Unary",
    "Binary",
    "Call",
    "ExprSyntaxError",
    "EvalError",
    "parse",
    "evaluate",
    "evaluate_array",
    "unparse",
]


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvalError(ArithmeticError):
    """Division by zero or a domain error during evaluation."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "x" or "y"


@dataclass(frozen=True)
class Unary:
    op: str  # "-"
    operand: "Ast"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Ast"


Ast = Union[Num, Var, Unary, Binary, Call]

_FUNCTIONS = {
    "sin": (math.sin, np.sin),
    "cos": (math.cos, np.cos),
    "exp": (math.exp, np.exp),
    "abs": (abs, np.abs),
    "sign": (lambda v: float(np.sign(v)), np.sign),
}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            stripped = src[pos:].lstrip()
            if not stripped:
                break
            raise ExprSyntaxError(
                f"unexpected character {stripped[0]!r}", pos + (len(src[pos:]) - len(stripped))
            )
        start = m.start("num") if m.group("num") else (
            m.start("ident") if m.group("ident") else m.start("op")
        )
        if m.group("num"):
            tokens.append(("num", float(m.group("num")), start))
        elif m.group("ident"):
            tokens.append(("ident", m.group("ident"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, len(src)))
    return tokens


# binding powers: (left, right); ^ is right-associative and outranks unary minus
_BINARY_BP = {"+": (10, 11), "-": (10, 11), "*": (20, 21), "/": (20, 21), "^": (31, 30)}
_UNARY_BP = 25


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", off)
        self.advance()

    def parse_expr(self, min_bp: int) -> Ast:
        node = self.parse_prefix()
        while True:
            kind, val, off = self.peek()
            if kind != "op" or val not in _BINARY_BP:
                break
            l_bp, r_bp = _BINARY_BP[val]
            if l_bp <= min_bp:
                break
            self.advance()
            rhs = self.parse_expr(r_bp)
            node = Binary(val, node, rhs)
        return node

    def parse_prefix(self) -> Ast:
        kind, val, off = self.advance()
        if kind == "num":
            return Num(val)
        if kind == "ident":
            if val in ("x", "y"):
                return Var(val)
            if val == "pi":
                return Num(math.pi)
            if val in _FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr(0)
                self.expect_op(")")
                return Call(val, arg)
            raise ExprSyntaxError(f"unknown identifier {val!r}", off)
        if kind == "op":
            if val == "-":
                return Unary("-", self.parse_expr(_UNARY_BP))
            if val == "+":
                return self.parse_expr(_UNARY_BP)
            if val == "(":
                inner = self.parse_expr(0)
                self.expect_op(")")
                return inner
        raise ExprSyntaxError("expected a value", off)


def parse(src: str) -> Ast:
    """Parse an expression string; errors carry the byte offset."""
    parser = _Parser(src)
    node = parser.parse_expr(0)
    kind, val, off = parser.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected trailing input {val!r}", off)
    return node


def evaluate(ast: Ast, x: float, y: float) -> float:
    """Recursive double-precision evaluation at a single point."""
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Var):
        return float(x) if ast.name == "x" else float(y)
    if isinstance(ast, Unary):
        return -evaluate(ast.operand, x, y)
    if isinstance(ast, Call):
        return float(_FUNCTIONS[ast.fn][0](evaluate(ast.arg, x, y)))
    l = evaluate(ast.left, x, y)
    r = evaluate(ast.right, x, y)
    if ast.op == "+":
        return l + r
    if ast.op == "-":
        return l - r
    if ast.op == "*":
        return l * r
    if ast.op == "/":
        if r == 0.0:
            raise EvalError("division by zero")
        return l / r
    try:
        out = l**r
    except (OverflowError, ZeroDivisionError, ValueError) as exc:
        raise EvalError(str(exc)) from exc
    if isinstance(out, complex):
        raise EvalError("fractional power of a negative base")
    return out


def evaluate_array(ast: Ast, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized evaluation; raises EvalError on division by zero or an
    invalid power anywhere in the batch."""
    with np.errstate(divide="raise", invalid="raise"):
        try:
            return np.broadcast_to(_eval_arr(ast, x, y), np.broadcast(x, y).shape).astype(float)
        except FloatingPointError as exc:
            raise EvalError(str(exc)) from exc


def _eval_arr(ast, x, y):
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Var):
        return x if ast.name == "x" else y
    if isinstance(ast, Unary):
        return -_eval_arr(ast.operand, x, y)
    if isinstance(ast, Call):
        return _FUNCTIONS[ast.fn][1](_eval_arr(ast.arg, x, y))
    l = _eval_arr(ast.left, x, y)
    r = _eval_arr(ast.right, x, y)
    if ast.op == "+":
        return l + r
    if ast.op == "-":
        return l - r
    if ast.op == "*":
        return l * r
    if ast.op == "/":
        return l / r
    return np.power(l, r)


def _prec(ast) -> int:
    if isinstance(ast, Binary):
        return _BINARY_BP[ast.op][0]
    if isinstance(ast, Unary):
        return _UNARY_BP
    return 100


def unparse(ast: Ast) -> str:
    """Print with minimal parentheses; parse(unparse(t)) == t."""
    if isinstance(ast, Num):
        return repr(ast.value)
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Unary):
        inner = unparse(ast.operand)
        if _prec(ast.operand) < _UNARY_BP:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(ast, Call):
        return f"{ast.fn}({unparse(ast.arg)})"
    l_bp, r_bp = _BINARY_BP[ast.op]
    left = unparse(ast.left)
    # right-associative ops (l_bp > r_bp) need parens around an equal-level left child
    if _prec(ast.left) < l_bp or (l_bp > r_bp and _prec(ast.left) == l_bp):
        left = f"({left})"
    right = unparse(ast.right)
    if _prec(ast.right) < r_bp:
        right = f"({right})"
    return f"{left} {ast.op} {right}"
