"""Relation language: arithmetic expressions compared against a target set.

A relation ``lhs <cmp> rhs`` is normalised to ``f <cmp'> 0`` with
``f = lhs - rhs`` (``>``/``>=`` flip the sign of ``f``). Evaluation works on
numpy arrays so a whole pixel grid is evaluated in one pass; points where the
real-valued result does not exist come back as NaN and are treated as
infinitely far from the target.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import MissingVariable, RelationSyntaxError, UnknownFunction

UNDEFINED = None


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}


@dataclass(frozen=True)
class TargetSet:
    """One of ``eq``, ``le``, ``lt`` (all against zero) or ``interval``."""

    kind: str
    lo: float = 0.0
    hi: float = 0.0

    def __post_init__(self):
        if self.kind not in ("eq", "le", "lt", "interval"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "interval" and not self.lo <= self.hi:
            raise ValueError(f"interval target needs lo <= hi, got [{self.lo}, {self.hi}]")


EQ_ZERO = TargetSet("eq")
LEQ_ZERO = TargetSet("le")
LT_ZERO = TargetSet("lt")


def interval(lo: float, hi: float) -> TargetSet:
    return TargetSet("interval", float(lo), float(hi))


@dataclass(frozen=True)
class Relation:
    id: str
    lhs: Expr
    target: TargetSet
    variables: tuple[str, ...]
    text: str = ""


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|[-+*/^()=<>,])"
    r")"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise RelationSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    # expr   := term (('+'|'-') term)*
    # term   := unary (('*'|'/') unary)*
    # unary  := '-' unary | '+' unary | power
    # power  := atom ('^' unary)?
    # atom   := NUM | NAME | NAME '(' expr ')' | '(' expr ')'

    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise RelationSyntaxError(f"expected {value!r}, found {found}", pos)

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
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if val not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {val!r}", pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in FUNCTIONS:
                raise RelationSyntaxError(f"function {val!r} needs an argument", pos)
            return Var(val)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise RelationSyntaxError(f"expected a number, name or '(', found {found}", pos)


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise RelationSyntaxError(f"unexpected {val!r}", pos)
    return node


_COMPARATORS = ("<=", ">=", "=", "<", ">")


def parse_relation(id: str, text: str) -> Relation:
    """Parse ``<expr> <cmp> <expr>`` into a relation against zero."""
    tokens = tokenize(text)
    cmps = [t for t in tokens if t[0] == "op" and t[1] in _COMPARATORS]
    if not cmps:
        raise RelationSyntaxError("missing comparison (=, <=, <, >=, >)", len(text))
    if len(cmps) > 1:
        raise RelationSyntaxError(f"more than one comparison {cmps[1][1]!r}", cmps[1][2])
    _, cmp, pos = cmps[0]
    left_text, right_text = text[:pos], text[pos + len(cmp):]
    if not left_text.strip():
        raise RelationSyntaxError("empty left-hand side", pos)
    if not right_text.strip():
        raise RelationSyntaxError("empty right-hand side", pos + len(cmp))
    left = parse_expr(left_text)
    try:
        right = parse_expr(right_text)
    except RelationSyntaxError as err:
        if err.position is None:
            raise
        offset = pos + len(cmp)
        msg = str(err).rsplit(" at position ", 1)[0]
        raise type(err)(msg, err.position + offset) from None

    if cmp in (">", ">="):
        lhs = BinOp("-", right, left)
        cmp = "<" if cmp == ">" else "<="
    else:
        lhs = BinOp("-", left, right)
    target = {"=": EQ_ZERO, "<=": LEQ_ZERO, "<": LT_ZERO}[cmp]
    return Relation(id, lhs, target, tuple(sorted(free_variables(lhs))), text.strip())


def free_variables(expr: Expr) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Num):
        return set()
    if isinstance(expr, Neg):
        return free_variables(expr.operand)
    if isinstance(expr, Call):
        return free_variables(expr.arg)
    return free_variables(expr.left) | free_variables(expr.right)


def to_text(expr: Expr) -> str:
    """Fully parenthesised rendering that parses back to the same tree."""
    if isinstance(expr, Num):
        return repr(float(expr.value))
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{to_text(expr.operand)})"
    if isinstance(expr, Call):
        return f"{expr.func}({to_text(expr.arg)})"
    return f"({to_text(expr.left)} {expr.op} {to_text(expr.right)})"


# ---------------------------------------------------------------------------
# evaluation


def _power(base, exp):
    with np.errstate(all="ignore"):
        out = np.power(base, exp)
        bad = ((base == 0) & (exp < 0)) | ((base < 0) & (exp != np.round(exp)))
    return np.where(bad, np.nan, out)


def _call(func, x):
    with np.errstate(all="ignore"):
        if func == "ln":
            return np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), np.nan)
        if func == "sqrt":
            return np.where(x >= 0, np.sqrt(np.where(x >= 0, x, 0.0)), np.nan)
        return FUNCTIONS[func](x)


def evaluate_array(expr: Expr, env: Mapping[str, np.ndarray]) -> np.ndarray:
    """Evaluate over (broadcastable) arrays; NaN marks undefined points."""
    out = _eval(expr, env)
    return np.asarray(out, dtype=float)


def _eval(expr, env):
    if isinstance(expr, Num):
        return np.float64(expr.value)
    if isinstance(expr, Var):
        try:
            return np.asarray(env[expr.name], dtype=float)
        except KeyError:
            raise MissingVariable(f"no value for variable {expr.name!r}") from None
    if isinstance(expr, Neg):
        return -_eval(expr.operand, env)
    if isinstance(expr, Call):
        out = _call(expr.func, _eval(expr.arg, env))
    else:
        a = _eval(expr.left, env)
        b = _eval(expr.right, env)
        with np.errstate(all="ignore"):
            if expr.op == "+":
                out = a + b
            elif expr.op == "-":
                out = a - b
            elif expr.op == "*":
                out = a * b
            elif expr.op == "/":
                out = np.where(b == 0, np.nan, a / np.where(b == 0, 1.0, b))
            else:
                out = _power(a, b)
    # overflow to +-inf anywhere poisons the whole subterm
    return np.where(np.isfinite(out), out, np.nan)


def evaluate(expr: Expr, assignment: Mapping[str, float]):
    """Evaluate at a single point; returns a float or ``UNDEFINED``."""
    value = float(evaluate_array(expr, assignment))
    return value if math.isfinite(value) else UNDEFINED


def distance_array(values: np.ndarray, target: TargetSet) -> np.ndarray:
    """Distance from each value to the target set; inf where undefined."""
    v = np.asarray(values, dtype=float)
    if target.kind == "eq":
        d = np.abs(v)
    elif target.kind in ("le", "lt"):
        d = np.maximum(v, 0.0)
    else:
        d = np.maximum(np.maximum(target.lo - v, v - target.hi), 0.0)
    return np.where(np.isnan(v), np.inf, d)


def distance_to_target(v, target: TargetSet) -> float:
    if v is UNDEFINED:
        return math.inf
    return float(distance_array(v, target))
