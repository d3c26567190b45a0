"""Bounded LTL formulas and their textual form (``.bltl`` files).

Text syntax, loosest binding first::

    phi ::= phi '->' phi                   (right associative)
          | phi '|' phi | phi '&' phi
          | '!' phi | ('F'|'G'|'X') '<=' bound phi
          | atom ('U'|'W') '<=' bound atom
    atom ::= 'true' | 'false' | '(' phi ')'
          | '{' ocl '}'                                   state predicate
          | 'occ' '(' '{' ocl '}' ',' a ',' b ')' cmp n   occurrence count
          | 'run' '[' a ',' b ']' '{' ocl '}'             mean/sum/prod/at
          | 'split' '(' '{' ocl '}' ',' '{' ocl '}' ',' a ',' b ')'

Bounds are numbers in the model's base unit or ``inf`` (to the trace end).
``--`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Tuple

from .errors import ParseError
from .syntax import ast as A
from .syntax.parser import parse_expr
from .syntax.printer import print_expr
from .units import format_time


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    args: Tuple


@dataclass(frozen=True)
class Or:
    args: Tuple


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Temporal:
    """``F<=k``, ``G<=k`` or ``X<=k`` applied to ``arg``."""

    op: str
    bound: float
    arg: object


@dataclass(frozen=True)
class Until:
    """``left U<=k right`` (``op='U'``) or weak until (``op='W'``)."""

    op: str
    bound: float
    left: object
    right: object


@dataclass(frozen=True)
class StatePred:
    """OCL boolean decided on the first state of the current suffix."""

    expr: object
    bindings: Tuple = ()  # ((var, instance-id), ...)


@dataclass(frozen=True)
class RunPred:
    """Predicate over a section of the run, decided by a dedicated procedure.

    ``kind`` is ``occ`` (``exprs=(psi,)``, compares the occurrence count of
    psi in the window with ``n`` using ``op``), ``mean``/``sum``/``prod``/``at``
    (``exprs=(comparison,)`` containing run-level operators evaluated over the
    window) or ``split`` (``exprs=(psi1, psi2)``: some split of the window has
    psi1 on the head and psi2 on the tail).  The window ``[lo, hi]`` is
    relative to the start of the current suffix.
    """

    kind: str
    exprs: Tuple
    lo: float
    hi: float
    op: str = None
    n: int = None
    bindings: Tuple = ()


def F(bound, arg):
    return Temporal("F", float(bound), arg)


def G(bound, arg):
    return Temporal("G", float(bound), arg)


def X(bound, arg):
    return Temporal("X", float(bound), arg)


def U(bound, left, right):
    return Until("U", float(bound), left, right)


def W(bound, left, right):
    return Until("W", float(bound), left, right)


def subformulas(phi):
    if isinstance(phi, Not):
        return (phi.arg,)
    if isinstance(phi, (And, Or)):
        return phi.args
    if isinstance(phi, Implies):
        return (phi.left, phi.right)
    if isinstance(phi, Temporal):
        return (phi.arg,)
    if isinstance(phi, Until):
        return (phi.left, phi.right)
    return ()


def depth(phi) -> int:
    return 1 + max((depth(c) for c in subformulas(phi)), default=0)


def required_horizon(phi) -> float:
    """Longest cumulative bound along any path; ``inf`` bounds count as 0."""
    own = 0.0
    if isinstance(phi, (Temporal, Until)) and not math.isinf(phi.bound):
        own = phi.bound
    elif isinstance(phi, RunPred):
        own = phi.hi
        for e in phi.exprs:
            for node in A.walk(e):
                if isinstance(node, A.At):
                    own = max(own, node.time)
    return own + max((required_horizon(c) for c in subformulas(phi)), default=0.0)


def remove_zero_next(phi):
    """Drop ``X<=0`` wrappers (they are the identity on any trace)."""
    if isinstance(phi, Temporal) and phi.op == "X" and phi.bound == 0:
        return remove_zero_next(phi.arg)
    if isinstance(phi, Not):
        return Not(remove_zero_next(phi.arg))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(remove_zero_next(a) for a in phi.args))
    if isinstance(phi, Implies):
        return Implies(remove_zero_next(phi.left), remove_zero_next(phi.right))
    if isinstance(phi, Temporal):
        return Temporal(phi.op, phi.bound, remove_zero_next(phi.arg))
    if isinstance(phi, Until):
        return Until(phi.op, phi.bound, remove_zero_next(phi.left), remove_zero_next(phi.right))
    return phi


# ---------------------------------------------------------------------------
# printing

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Temporal: 4, Until: 5}
_ATOM = 6


def _prec(phi):
    return _PREC.get(type(phi), _ATOM)


def _wrap(phi, needed):
    text = format_formula(phi)
    return f"({text})" if needed else text


def _pred(expr, bindings):
    if bindings:
        raise ValueError("predicates with open bindings have no textual form; unfold them first")
    return "{" + print_expr(expr) + "}"


def format_formula(phi, top_level_lines: bool = False) -> str:
    """Render ``phi``; with ``top_level_lines`` each top-level conjunct gets its own line."""
    if isinstance(phi, Const):
        return "true" if phi.value else "false"
    if isinstance(phi, StatePred):
        return _pred(phi.expr, phi.bindings)
    if isinstance(phi, RunPred):
        if phi.bindings:
            raise ValueError("predicates with open bindings have no textual form; unfold them first")
        lo, hi = format_time(phi.lo), format_time(phi.hi)
        if phi.kind == "occ":
            return f"occ({_pred(phi.exprs[0], ())}, {lo}, {hi}) {phi.op} {phi.n}"
        if phi.kind == "split":
            return f"split({_pred(phi.exprs[0], ())}, {_pred(phi.exprs[1], ())}, {lo}, {hi})"
        return f"run[{lo}, {hi}]{_pred(phi.exprs[0], ())}"
    if isinstance(phi, Not):
        return "!" + _wrap(phi.arg, _prec(phi.arg) < 4)
    if isinstance(phi, Temporal):
        return f"{phi.op}<={format_time(phi.bound)} " + _wrap(phi.arg, _prec(phi.arg) < 4)
    if isinstance(phi, Until):
        left = _wrap(phi.left, _prec(phi.left) < _ATOM)
        right = _wrap(phi.right, _prec(phi.right) < _ATOM)
        return f"{left} {phi.op}<={format_time(phi.bound)} {right}"
    if isinstance(phi, (And, Or)):
        p = _prec(phi)
        parts = [_wrap(a, _prec(a) <= p) for a in phi.args]
        sym = " & " if isinstance(phi, And) else " | "
        if top_level_lines and isinstance(phi, And):
            return "\n& ".join(parts)
        if not parts:
            return "true" if isinstance(phi, And) else "false"
        if len(parts) == 1:
            return f"({parts[0]})"
        return sym.join(parts)
    if isinstance(phi, Implies):
        return f"{_wrap(phi.left, _prec(phi.left) <= 1)} -> {_wrap(phi.right, _prec(phi.right) < 1)}"
    raise TypeError(f"not a B-LTL formula: {phi!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<pred>\{[^{}]*\})
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?|inf)
  | (?P<op><=|>=|->|<>|[!&|()\[\],<>=])
  | (?P<word>[A-Za-z_]+)
""", re.VERBOSE)


def _tokenize(text):
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            line = text.count("\n", 0, pos) + 1
            raise ParseError(f"unexpected character {text[pos]!r} in formula", line,
                             pos - text.rfind("\n", 0, pos))
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", pos))
    return out


class _FormulaParser:
    def __init__(self, text, base_unit):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.base_unit = base_unit

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        kind, value, pos = self.peek()
        line = self.text.count("\n", 0, pos) + 1
        col = pos - self.text.rfind("\n", 0, pos)
        return ParseError(f"syntax error in formula at {value or 'end of input'!r}", line, col, expected)

    def expect(self, value):
        if self.peek()[1] != value:
            raise self.fail([f"'{value}'"])
        return self.take()

    def number(self):
        kind, value, _ = self.peek()
        if kind != "num":
            raise self.fail(["number"])
        self.take()
        return math.inf if value == "inf" else float(value)

    def pred(self):
        kind, value, pos = self.peek()
        if kind != "pred":
            raise self.fail(["'{...}'"])
        self.take()
        try:
            return parse_expr(value[1:-1], self.base_unit)
        except ParseError as exc:
            raise ParseError(f"in predicate {value}: {exc.message}", exc.line, exc.column) from None

    def formula(self):
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self):
        args = [self.conjunction()]
        while self.peek()[1] == "|":
            self.take()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self):
        args = [self.unary()]
        while self.peek()[1] == "&":
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self):
        kind, value, _ = self.peek()
        if value == "!":
            self.take()
            return Not(self.unary())
        if kind == "word" and value in ("F", "G", "X"):
            self.take()
            self.expect("<=")
            bound = self.number()
            return Temporal(value, bound, self.unary())
        left = self.atom()
        kind, value, _ = self.peek()
        if kind == "word" and value in ("U", "W"):
            self.take()
            self.expect("<=")
            bound = self.number()
            return Until(value, bound, left, self.atom())
        return left

    def atom(self):
        kind, value, _ = self.peek()
        if kind == "pred":
            return StatePred(self.pred())
        if value == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        if kind == "word":
            if value in ("true", "false"):
                self.take()
                return Const(value == "true")
            if value == "occ":
                self.take()
                self.expect("(")
                psi = self.pred()
                self.expect(",")
                lo = self.number()
                self.expect(",")
                hi = self.number()
                self.expect(")")
                op = self.take()[1]
                if op not in ("<", "<=", "=", ">=", ">", "<>"):
                    raise self.fail(["comparison"])
                n = self.number()
                return RunPred("occ", (psi,), lo, hi, op, int(n))
            if value == "run":
                self.take()
                self.expect("[")
                lo = self.number()
                self.expect(",")
                hi = self.number()
                self.expect("]")
                expr = self.pred()
                return RunPred(aggregate_kind(expr), (expr,), lo, hi)
            if value == "split":
                self.take()
                self.expect("(")
                p1 = self.pred()
                self.expect(",")
                p2 = self.pred()
                self.expect(",")
                lo = self.number()
                self.expect(",")
                hi = self.number()
                self.expect(")")
                return RunPred("split", (p1, p2), lo, hi)
        raise self.fail(["'true'", "'false'", "'('", "'{'", "'occ'", "'run'", "'split'"])


def aggregate_kind(expr) -> str:
    for node in A.walk(expr):
        if isinstance(node, A.PathOp):
            return node.kind
        if isinstance(node, A.At):
            return "at"
    raise ParseError("run predicate contains no mean/sum/prod/at operator")


def parse_formula(text: str, base_unit: str = "day"):
    p = _FormulaParser(text, base_unit)
    phi = p.formula()
    if p.peek()[0] != "eof":
        raise p.fail(["end of input"])
    return phi
