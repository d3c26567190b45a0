"""Recursive-descent parser for GCSL contracts and the embedded OCL subset.

Grammar summary (keywords of the pattern layer are case-insensitive)::

    document  ::= contract+
    contract  ::= ident* 'contract' ident ['Assumption:' property]
                  'Goal:' property 'Confidence:' (number '%' | number)
    property  ::= path '->' ('forAll'|'exists') '(' ident '|' body ')'
                | pattern | ocl-expr
    pattern   ::= the eleven forms a-k, state propositions in '[...]'
    interval  ::= ('['|'(') time [('-'|',') time] (']'|')')
    time      ::= number [unit] | 'inf'
"""
from __future__ import annotations

import math
from fractions import Fraction

from ..errors import ParseError
from ..units import DEFAULT_UNIT, is_unit, to_base
from . import ast as A
from .lexer import Token, tokenize

MAX_NESTING = 2

_RESERVED = {"and", "or", "not", "implies", "true", "false"}
_CONTINUES_EXPR = {".", "->", "=", "<>", "<", "<=", ">", ">=", "+", "-", "*", "/"}


class Parser:
    def __init__(self, text: str, base_unit: str = DEFAULT_UNIT):
        self.tokens = tokenize(text)
        self.pos = 0
        self.base_unit = base_unit

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset=1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, message, expected=(), tok=None):
        tok = tok or self.tok
        return ParseError(f"{message}, found {tok}", tok.line, tok.col, expected)

    def at_kw(self, word, tok=None) -> bool:
        tok = tok or self.tok
        return tok.kind == "ident" and tok.value.lower() == word

    def accept_kw(self, word) -> bool:
        if self.at_kw(word):
            self.advance()
            return True
        return False

    def expect_kw(self, *words):
        for word in words:
            if not self.accept_kw(word):
                raise self.error("syntax error", [f"'{word}'"])

    def at_op(self, op) -> bool:
        return self.tok.kind == "op" and self.tok.value == op

    def accept_op(self, op) -> bool:
        if self.at_op(op):
            self.advance()
            return True
        return False

    def expect_op(self, op):
        if not self.accept_op(op):
            raise self.error("syntax error", [f"'{op}'"])

    def expect_ident(self, what="identifier") -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.value in _RESERVED:
            raise self.error("syntax error", [what])
        self.advance()
        return tok.value

    def expect_eof(self):
        if self.tok.kind != "eof":
            raise self.error("unexpected trailing input", ["end of input"])

    # -- contracts ---------------------------------------------------------

    def document(self) -> list[A.Contract]:
        contracts = [self.contract()]
        while self.tok.kind != "eof":
            contracts.append(self.contract())
        return contracts

    def contract(self) -> A.Contract:
        start = self.tok
        viewpoints = []
        while not self.at_kw("contract"):
            if self.tok.kind != "ident":
                raise self.error("syntax error", ["viewpoint", "'contract'"])
            viewpoints.append(self.advance().value)
        self.advance()
        name = self.expect_ident("contract name")
        assumption = None
        if self.at_section("assumption"):
            self.pos += 2
            assumption = self.property()
        if not self.at_section("goal"):
            raise self.error("syntax error", ["'Goal:'"] + ([] if assumption else ["'Assumption:'"]))
        self.pos += 2
        goal = self.property()
        if not self.at_section("confidence"):
            raise self.error("syntax error", ["'Confidence:'"])
        self.pos += 2
        confidence = self.threshold()
        for prop in (assumption, goal):
            if prop is not None:
                check_property(prop, start)
        return A.Contract(name=name, goal=goal, confidence=confidence,
                          assumption=assumption, viewpoints=tuple(viewpoints))

    def at_section(self, word) -> bool:
        nxt = self.peek()
        return self.at_kw(word) and nxt.kind == "op" and nxt.value == ":"

    def threshold(self) -> float:
        tok = self.tok
        if tok.kind != "num":
            raise self.error("syntax error", ["probability", "percentage"])
        self.advance()
        value = float(tok.value)
        if self.accept_op("%"):
            value = float(Fraction(tok.value) / 100)
        if not 0.0 < value <= 1.0:
            raise ParseError(f"confidence {tok.value} outside (0, 1]", tok.line, tok.col)
        return value

    # -- properties and patterns --------------------------------------------

    def starts_pattern(self) -> bool:
        return self.at_kw("whenever") or self.at_kw("always") or self.at_op("[")

    def property(self):
        if self.starts_pattern():
            return self.pattern()
        save = self.pos
        quantified = self.try_quantified()
        if quantified is not None:
            return quantified
        self.pos = save
        return A.OclProp(self.expr())

    def try_quantified(self):
        """Parse ``path->forAll(v | <pattern or quantified>)`` or return None."""
        if self.tok.kind != "ident" or self.tok.value in _RESERVED:
            return None
        coll = A.Name(self.advance().value)
        while self.at_op(".") and self.peek().kind == "ident":
            self.advance()
            coll = A.Nav(coll, self.advance().value)
        if not self.accept_op("->"):
            return None
        kind = _iterator_kind(self.tok)
        if kind is None or self.peek().value != "(":
            return None
        self.pos += 2
        if self.tok.kind != "ident" or self.peek().value != "|":
            return None
        var = self.advance().value
        self.advance()
        if self.starts_pattern():
            body = self.pattern()
        else:
            body = self.try_quantified()
            if body is None:
                return None
        if not self.accept_op(")"):
            return None
        nxt = self.tok
        if (nxt.kind == "op" and nxt.value in _CONTINUES_EXPR) or (
            nxt.kind == "ident" and nxt.value in ("and", "or", "implies")
        ):
            return None
        return A.Quantified(kind, coll, var, body)

    def slot(self):
        self.expect_op("[")
        expr = self.expr()
        self.expect_op("]")
        return expr

    def count(self) -> int:
        bracketed = self.accept_op("[")
        tok = self.tok
        if tok.kind != "num" or not tok.value.isdigit():
            raise self.error("syntax error", ["occurrence count"])
        self.advance()
        if bracketed:
            self.expect_op("]")
        n = int(tok.value)
        if n < 1:
            raise ParseError("occurrence count must be a positive integer", tok.line, tok.col)
        return n

    def time(self) -> float:
        if self.at_op("+") and self.at_kw("inf", self.peek()):
            self.advance()
        if self.accept_kw("inf"):
            return math.inf
        tok = self.tok
        if tok.kind != "num":
            raise self.error("syntax error", ["time"])
        self.advance()
        unit = None
        if self.tok.kind == "ident":
            if not is_unit(self.tok.value):
                raise ParseError(f"unknown time unit {self.tok.value!r}", self.tok.line, self.tok.col)
            unit = self.advance().value
        return to_base(tok.value, unit, self.base_unit)

    def interval(self) -> A.TimeInterval:
        start = self.tok
        if self.accept_op("["):
            lo_closed = True
        elif self.accept_op("("):
            lo_closed = False
        else:
            raise self.error("syntax error", ["'['", "'('"])
        first = self.time()
        if self.accept_op("-") or self.accept_op(","):
            lo, hi = first, self.time()
        else:
            lo, hi = 0.0, first
        if self.accept_op("]"):
            hi_closed = True
        elif self.accept_op(")"):
            hi_closed = False
        else:
            raise self.error("syntax error", ["']'", "')'"])
        if math.isinf(lo) or lo > hi:
            raise ParseError(f"interval with lo > hi ({lo} > {hi})", start.line, start.col)
        return A.TimeInterval(lo, hi, lo_closed, hi_closed)

    def pattern(self) -> A.Pattern:
        if self.accept_kw("always"):
            return A.Pattern("c", psi=self.slot())
        if self.accept_kw("whenever"):
            return self.whenever_pattern()
        first = self.slot()
        if self.accept_kw("implies"):
            second = self.slot()
            if self.accept_kw("holds"):
                self.expect_kw("forever")
                return A.Pattern("b", psi1=first, psi2=second)
            self.expect_kw("during", "following")
            return A.Pattern("e", psi=None, psi1=first, psi2=second, intervals=(self.interval(),))
        if self.accept_kw("during"):
            whole = self.interval()
            if self.accept_kw("raises"):
                return A.Pattern("j", psi1=first, psi2=self.slot(), intervals=(whole,))
            if not self.accept_kw("implies"):
                raise self.error("syntax error", ["'raises'", "'implies'"])
            psi1 = self.slot()
            self.expect_kw("during")
            head = self.interval()
            self.expect_kw("then")
            psi2 = self.slot()
            self.expect_kw("during")
            tail = self.interval()
            return A.Pattern("k", psi=first, psi1=psi1, psi2=psi2, intervals=(whole, head, tail))
        if self.accept_kw("occurs"):
            if self.accept_kw("at"):
                self.expect_kw("most")
                n = self.count()
                self.expect_kw("times", "during")
                return A.Pattern("i", psi=first, n=n, intervals=(self.interval(),))
            n = self.count()
            self.expect_kw("times", "during")
            window = self.interval()
            self.expect_kw("raises")
            return A.Pattern("h", psi1=first, psi2=self.slot(), n=n, intervals=(window,))
        raise self.error("syntax error", ["'implies'", "'during'", "'occurs'"])

    def whenever_pattern(self) -> A.Pattern:
        psi1 = self.slot()
        self.expect_kw("occurs")
        self.accept_op(",")
        psi2 = self.slot()
        if self.accept_kw("holds"):
            if self.accept_kw("during"):
                self.expect_kw("following")
                return A.Pattern("a", psi1=psi1, psi2=psi2, intervals=(self.interval(),))
            return A.Pattern("d", psi1=psi1, psi2=psi2)
        if self.accept_kw("implies"):
            psi3 = self.slot()
            self.expect_kw("during", "following")
            return A.Pattern("e", psi=psi1, psi1=psi2, psi2=psi3, intervals=(self.interval(),))
        if self.accept_kw("does"):
            self.expect_kw("not", "occur", "during", "following")
            return A.Pattern("f", psi1=psi1, psi2=psi2, intervals=(self.interval(),))
        if self.accept_kw("occurs"):
            self.expect_kw("within")
            return A.Pattern("g", psi1=psi1, psi2=psi2, intervals=(self.interval(),))
        raise self.error("syntax error", ["'holds'", "'implies'", "'does'", "'occurs'"])

    # -- OCL expressions ---------------------------------------------------

    def expr(self):
        left = self.or_expr()
        while self.tok.kind == "ident" and self.tok.value == "implies" and not self._pattern_implies():
            self.advance()
            left = A.Binary("implies", left, self.or_expr())
        return left

    def _pattern_implies(self) -> bool:
        # "[p] implies [q] ..." belongs to the pattern layer, not to OCL
        nxt = self.peek()
        return nxt.kind == "op" and nxt.value == "["

    def or_expr(self):
        left = self.and_expr()
        while self.tok.kind == "ident" and self.tok.value == "or":
            self.advance()
            left = A.Binary("or", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.tok.kind == "ident" and self.tok.value == "and":
            self.advance()
            left = A.Binary("and", left, self.not_expr())
        return left

    def not_expr(self):
        if self.tok.kind == "ident" and self.tok.value == "not":
            self.advance()
            return A.Unary("not", self.not_expr())
        return self.compare_expr()

    def compare_expr(self):
        left = self.add_expr()
        if self.tok.kind == "op" and self.tok.value in A.COMPARE_OPS:
            op = self.advance().value
            left = A.Binary(op, left, self.add_expr())
            if self.tok.kind == "op" and self.tok.value in A.COMPARE_OPS:
                raise self.error("comparisons do not chain; add parentheses")
        return left

    def add_expr(self):
        left = self.mul_expr()
        while self.tok.kind == "op" and self.tok.value in ("+", "-"):
            op = self.advance().value
            left = A.Binary(op, left, self.mul_expr())
        return left

    def mul_expr(self):
        left = self.unary_expr()
        while self.tok.kind == "op" and self.tok.value in ("*", "/"):
            op = self.advance().value
            left = A.Binary(op, left, self.unary_expr())
        return left

    def unary_expr(self):
        if self.accept_op("-"):
            return A.Unary("-", self.unary_expr())
        return self.postfix_expr()

    def postfix_expr(self):
        expr = self.primary()
        while True:
            if self.accept_op("."):
                expr = A.Nav(expr, self.expect_ident("attribute name"))
            elif self.accept_op("->"):
                expr = self.collection_op(expr)
            else:
                return expr

    def collection_op(self, target):
        tok = self.tok
        kind = _iterator_kind(tok)
        if kind is not None:
            self.advance()
            self.expect_op("(")
            var = None
            if self.tok.kind == "ident" and self.peek().value == "|":
                var = self.advance().value
                self.advance()
            body = self.expr()
            self.expect_op(")")
            return A.Iterate(target, kind, var, body)
        if tok.kind == "ident" and tok.value in ("size", "sum"):
            self.advance()
            self.expect_op("(")
            self.expect_op(")")
            return A.CollOp(target, tok.value)
        raise self.error("unsupported collection operation",
                         ["'forAll'", "'exists'", "'size'", "'sum'"])

    def primary(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            if any(c in tok.value for c in ".eE"):
                return A.Num(float(tok.value))
            return A.Num(int(tok.value))
        if tok.kind == "enum":
            self.advance()
            return A.EnumLit(tok.value)
        if self.accept_op("("):
            inner = self.expr()
            self.expect_op(")")
            return inner
        if tok.kind == "ident":
            if tok.value in ("true", "false"):
                self.advance()
                return A.Bool(tok.value == "true")
            if self.peek().value == "(" and self.peek().kind == "op":
                if tok.value in ("mean", "sum", "prod"):
                    self.pos += 2
                    inner = self.expr()
                    self.expect_op(")")
                    return A.PathOp(tok.value, inner)
                if tok.value == "at":
                    self.pos += 2
                    inner = self.expr()
                    self.expect_op(",")
                    when = self.time()
                    self.expect_op(")")
                    return A.At(inner, when)
            if tok.value not in _RESERVED:
                self.advance()
                return A.Name(tok.value)
        raise self.error("syntax error", ["expression"])


def _iterator_kind(tok):
    if tok.kind != "ident":
        return None
    return {"forall": "forAll", "exists": "exists"}.get(tok.value.lower())


# ---------------------------------------------------------------------------
# static checks


def check_property(prop, where: Token | None = None):
    """Enforce the nesting limit, distinct bound variables and the ban on
    run-level operators inside pattern slots."""
    line, col = (where.line, where.col) if where else (None, None)
    depth = A.property_depth(prop)
    if depth > MAX_NESTING:
        raise ParseError(
            f"quantifier nesting depth {depth} exceeds the limit of {MAX_NESTING}", line, col)
    _check_scopes(prop, (), line, col)


def _check_scopes(prop, bound, line, col):
    if isinstance(prop, A.Quantified):
        _check_expr_scopes(prop.collection, bound, line, col)
        if prop.var in bound:
            raise ParseError(f"variable {prop.var!r} rebound in nested quantifier", line, col)
        _check_scopes(prop.body, bound + (prop.var,), line, col)
    elif isinstance(prop, A.Pattern):
        for slot in prop.slots():
            if slot is None:
                continue
            if A.has_path_ops(slot):
                raise ParseError("run-level operators (mean/sum/prod/at) are not allowed "
                                 "inside pattern propositions", line, col)
            _check_expr_scopes(slot, bound, line, col)
    elif isinstance(prop, A.OclProp):
        _check_expr_scopes(prop.expr, bound, line, col)
        _check_path_nesting(prop.expr, False, line, col)
    elif isinstance(prop, (A.Conj, A.Disj)):
        for item in prop.items:
            _check_scopes(item, bound, line, col)


def _check_expr_scopes(expr, bound, line, col):
    if isinstance(expr, A.Iterate):
        _check_expr_scopes(expr.target, bound, line, col)
        if expr.var is not None and expr.var in bound:
            raise ParseError(f"variable {expr.var!r} rebound in nested quantifier", line, col)
        inner = bound + ((expr.var,) if expr.var else ())
        _check_expr_scopes(expr.body, inner, line, col)
        return
    for child in A.children(expr):
        _check_expr_scopes(child, bound, line, col)


def _check_path_nesting(expr, inside, line, col):
    is_path = isinstance(expr, (A.PathOp, A.At))
    if is_path and inside:
        raise ParseError("run-level operators cannot be nested", line, col)
    for child in A.children(expr):
        _check_path_nesting(child, inside or is_path, line, col)


# ---------------------------------------------------------------------------
# entry points


def parse_contracts(text: str, base_unit: str = DEFAULT_UNIT) -> list[A.Contract]:
    """Parse every contract in a contract document."""
    p = Parser(text, base_unit)
    return p.document()


def parse_contract(text: str, base_unit: str = DEFAULT_UNIT) -> A.Contract:
    contracts = parse_contracts(text, base_unit)
    if len(contracts) != 1:
        raise ParseError(f"expected exactly one contract, found {len(contracts)}")
    return contracts[0]


def parse_property(text: str, base_unit: str = DEFAULT_UNIT):
    p = Parser(text, base_unit)
    prop = p.property()
    p.expect_eof()
    check_property(prop, p.tokens[0])
    return prop


def parse_pattern(text: str, base_unit: str = DEFAULT_UNIT) -> A.Pattern:
    p = Parser(text, base_unit)
    if not p.starts_pattern():
        raise p.error("syntax error", ["'whenever'", "'always'", "'['"])
    pattern = p.pattern()
    p.expect_eof()
    check_property(pattern, p.tokens[0])
    return pattern


def parse_expr(text: str, base_unit: str = DEFAULT_UNIT):
    """Parse a bare OCL expression (guards, actions, CLI ``eval``)."""
    p = Parser(text, base_unit)
    expr = p.expr()
    p.expect_eof()
    return expr
