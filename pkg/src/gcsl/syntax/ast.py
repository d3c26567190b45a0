"""Immutable syntax trees for OCL expressions and GCSL contracts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

# --------------------------------------------------------------------------
# OCL expressions


@dataclass(frozen=True)
class Num:
    value: Union[int, float]


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class EnumLit:
    name: str


@dataclass(frozen=True)
class Name:
    """A bare identifier: variable, instance id, ``SoS`` or ``self``."""

    id: str


@dataclass(frozen=True)
class Nav:
    """Dot navigation ``target.name``."""

    target: "Expr"
    name: str


@dataclass(frozen=True)
class CollOp:
    """Argument-less collection operation: ``->size()`` or ``->sum()``."""

    target: "Expr"
    op: str


@dataclass(frozen=True)
class Iterate:
    """``target->forAll(var | body)`` / ``->exists``.

    ``var`` is None for the implicit-iterator shorthand ``->exists(attr)``,
    in which case bare attribute names in ``body`` refer to the element.
    """

    target: "Expr"
    kind: str  # 'forAll' | 'exists'
    var: Optional[str]
    body: "Expr"


@dataclass(frozen=True)
class Unary:
    op: str  # 'not' | '-'
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class PathOp:
    """Run-level aggregate ``mean(e)``, ``sum(e)`` or ``prod(e)``."""

    kind: str
    expr: "Expr"


@dataclass(frozen=True)
class At:
    """Run-level sample ``at(e, time)``; ``time`` is in base units."""

    expr: "Expr"
    time: float


Expr = Union[Num, Bool, EnumLit, Name, Nav, CollOp, Iterate, Unary, Binary, PathOp, At]

LOGIC_OPS = ("implies", "or", "and")
COMPARE_OPS = ("=", "<>", "<", "<=", ">", ">=")
ARITH_OPS = ("+", "-", "*", "/")


def children(expr):
    if isinstance(expr, (Nav, CollOp)):
        return (expr.target,)
    if isinstance(expr, (PathOp, At)):
        return (expr.expr,)
    if isinstance(expr, Iterate):
        return (expr.target, expr.body)
    if isinstance(expr, Unary):
        return (expr.operand,)
    if isinstance(expr, Binary):
        return (expr.left, expr.right)
    return ()


def walk(expr):
    """Pre-order traversal of an OCL expression."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def has_path_ops(expr) -> bool:
    return any(isinstance(n, (PathOp, At)) for n in walk(expr))


def quantifier_depth(expr) -> int:
    if isinstance(expr, Iterate):
        return max(quantifier_depth(expr.target), 1 + quantifier_depth(expr.body))
    return max((quantifier_depth(c) for c in children(expr)), default=0)


# --------------------------------------------------------------------------
# GCSL properties


@dataclass(frozen=True)
class TimeInterval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True


# slot names used by each pattern kind, in source order
PATTERN_SLOTS = {
    "a": ("psi1", "psi2"),
    "b": ("psi1", "psi2"),
    "c": ("psi",),
    "d": ("psi1", "psi2"),
    "e": ("psi", "psi1", "psi2"),
    "f": ("psi1", "psi2"),
    "g": ("psi1", "psi2"),
    "h": ("psi1", "psi2"),
    "i": ("psi",),
    "j": ("psi1", "psi2"),
    "k": ("psi", "psi1", "psi2"),
}
PATTERN_INTERVALS = {"a": 1, "b": 0, "c": 0, "d": 0, "e": 1, "f": 1, "g": 1,
                     "h": 1, "i": 1, "j": 1, "k": 3}


@dataclass(frozen=True)
class Pattern:
    """One of the eleven behavioural patterns, identified by letter a-k.

    For kind ``e`` a ``psi`` of None denotes the short form
    ``[psi1] implies [psi2] during following [a,b]`` (trigger implicitly true,
    absolute interval).
    """

    kind: str
    psi: Optional[Expr] = None
    psi1: Optional[Expr] = None
    psi2: Optional[Expr] = None
    n: Optional[int] = None
    intervals: Tuple[TimeInterval, ...] = ()

    def slots(self):
        return tuple(getattr(self, s) for s in PATTERN_SLOTS[self.kind])


@dataclass(frozen=True)
class OclProp:
    expr: Expr


@dataclass(frozen=True)
class Quantified:
    kind: str  # 'forAll' | 'exists'
    collection: Expr
    var: str
    body: "PropertyExpr"


@dataclass(frozen=True)
class Conj:
    """Conjunction produced by unfolding a universal quantifier."""

    items: Tuple["PropertyExpr", ...]


@dataclass(frozen=True)
class Disj:
    items: Tuple["PropertyExpr", ...]


PropertyExpr = Union[Quantified, Pattern, OclProp, Conj, Disj]


def property_depth(prop) -> int:
    """Longest chain of nested quantifiers, counting OCL iterators in slots."""
    if isinstance(prop, Quantified):
        return 1 + property_depth(prop.body)
    if isinstance(prop, Pattern):
        return max((quantifier_depth(s) for s in prop.slots() if s is not None), default=0)
    if isinstance(prop, OclProp):
        return quantifier_depth(prop.expr)
    if isinstance(prop, (Conj, Disj)):
        return max((property_depth(p) for p in prop.items), default=0)
    raise TypeError(prop)


@dataclass(frozen=True)
class Contract:
    name: str
    goal: PropertyExpr
    confidence: float
    assumption: Optional[PropertyExpr] = None
    viewpoints: Tuple[str, ...] = field(default=())
