"""Compilation of GCSL contracts to closed bounded-LTL formulas.

Two steps: quantifiers over statically known collections are unfolded into
conjunctions/disjunctions over the instances (in declaration order), then
each behavioural pattern is mapped to its bounded-LTL template with the
user-supplied horizon ``k`` standing in for unbounded intervals.
"""
from __future__ import annotations

import math

from . import bltl as B
from .errors import TranslationError
from .syntax import ast as A
from .syntax.parser import MAX_NESTING
from .syntax.printer import print_expr
from .units import format_time

# pattern letter -> row of the mapping table (b has no row: see translate_pattern)
ROWS = {"a": 8, "b": None, "c": 1, "d": 2, "e": 9, "f": 10, "g": 12,
        "h": 6, "i": 7, "j": 4, "k": 5}
SHORT_E_ROW = 3

TABLE_SPLIT = "table"
EXISTS_SPLIT = "exists"


# ---------------------------------------------------------------------------
# unfolding


def _has_member(model, iid, name) -> bool:
    inst = model.instance(iid)
    if inst is None:
        return False
    return model.type_of(iid).attribute(name) is not None or inst.link(name) is not None


def static_collection(expr, model):
    """Instance ids denoted by ``expr`` if it is a navigation over links, else None."""
    if isinstance(expr, A.Nav):
        if isinstance(expr.target, A.Name) and expr.target.id == "SoS":
            ids = model.collection(expr.name)
            if ids is None:
                raise TranslationError(f"unresolved collection SoS.{expr.name}")
            return tuple(ids)
        if isinstance(expr.target, A.Name) and model.instance(expr.target.id) is not None:
            sources = (expr.target.id,)
        else:
            sources = static_collection(expr.target, model)
            if sources is None:
                return None
        out = []
        for iid in sources:
            targets = model.instance(iid).link(expr.name)
            if targets is None:
                return None
            out.extend(targets)
        return tuple(out)
    return None


def _chain(op, items, empty):
    if not items:
        return A.Bool(empty)
    out = items[0]
    for item in items[1:]:
        out = A.Binary(op, out, item)
    return out


def unfold_expr(expr, model, env=None, implicit=()):
    """Substitute bound variables and unfold iterators over static collections."""
    env = env or {}

    def go(e, implicit):
        if isinstance(e, A.Name):
            if e.id in env:
                return A.Name(env[e.id])
            if e.id == "SoS":
                return e
            for elem in reversed(implicit):
                if _has_member(model, elem, e.id):
                    return A.Nav(A.Name(elem), e.id)
            return e
        if isinstance(e, A.Iterate):
            target = go(e.target, implicit)
            ids = static_collection(target, model)
            if ids is None:
                return A.Iterate(target, e.kind, e.var, go(e.body, implicit))
            bodies = []
            for iid in ids:
                if e.var is None:
                    bodies.append(go(e.body, implicit + (iid,)))
                else:
                    saved = env.get(e.var)
                    env[e.var] = iid
                    try:
                        bodies.append(go(e.body, implicit))
                    finally:
                        if saved is None:
                            env.pop(e.var)
                        else:
                            env[e.var] = saved
            forall = e.kind == "forAll"
            return _chain("and" if forall else "or", bodies, forall)
        if isinstance(e, A.Nav):
            return A.Nav(go(e.target, implicit), e.name)
        if isinstance(e, A.CollOp):
            return A.CollOp(go(e.target, implicit), e.op)
        if isinstance(e, A.Unary):
            return A.Unary(e.op, go(e.operand, implicit))
        if isinstance(e, A.Binary):
            return A.Binary(e.op, go(e.left, implicit), go(e.right, implicit))
        if isinstance(e, A.PathOp):
            return A.PathOp(e.kind, go(e.expr, implicit))
        if isinstance(e, A.At):
            return A.At(go(e.expr, implicit), e.time)
        return e

    return go(expr, tuple(implicit))


def unfold(prop, model):
    """Quantifier-free form of ``prop``: forAll becomes a conjunction, exists a disjunction."""
    depth = A.property_depth(prop)
    if depth > MAX_NESTING:
        raise TranslationError(f"quantifier nesting depth {depth} exceeds the limit of {MAX_NESTING}")
    return _unfold(prop, model, {})


def _unfold(prop, model, env):
    if isinstance(prop, A.Quantified):
        coll = unfold_expr(prop.collection, model, env)
        ids = static_collection(coll, model)
        if ids is None:
            raise TranslationError(f"unresolved collection {print_expr(prop.collection)}")
        items = tuple(_unfold(prop.body, model, {**env, prop.var: iid}) for iid in ids)
        if len(items) == 1:
            return items[0]
        return A.Conj(items) if prop.kind == "forAll" else A.Disj(items)
    if isinstance(prop, A.Pattern):
        def slot(e):
            return None if e is None else unfold_expr(e, model, env)
        return A.Pattern(prop.kind, slot(prop.psi), slot(prop.psi1), slot(prop.psi2),
                         prop.n, prop.intervals)
    if isinstance(prop, A.OclProp):
        return A.OclProp(unfold_expr(prop.expr, model, env))
    if isinstance(prop, (A.Conj, A.Disj)):
        return type(prop)(tuple(_unfold(p, model, env) for p in prop.items))
    raise TypeError(f"not a property: {prop!r}")


# ---------------------------------------------------------------------------
# pattern mapping


def _leaf(expr, bindings):
    if isinstance(expr, A.Bool):
        return B.Const(expr.value)
    return B.StatePred(expr, bindings)


def _require(ok, kind, condition, values):
    if not ok:
        shown = ", ".join(f"{k}={format_time(v)}" for k, v in values.items())
        raise TranslationError(f"pattern {kind}: inconsistent interval, requires {condition} ({shown})")


def translate_pattern(p: A.Pattern, k: float, bindings=(), split: str = TABLE_SPLIT):
    """Bounded-LTL template of pattern ``p`` for horizon ``k`` (base time units).

    Infinite interval ends are replaced by ``k``.  ``bindings`` (pairs of
    variable and instance id) are attached to every state predicate, which
    lets a caller interpret quantifiers without substituting them away.
    """
    if not k > 0 or math.isinf(k):
        raise TranslationError(f"the time bound k must be a positive finite time, got {k}")
    bindings = tuple(bindings)
    psi, psi1, psi2 = (None if e is None else _leaf(e, bindings) for e in (p.psi, p.psi1, p.psi2))
    ivs = [(iv.lo, k if math.isinf(iv.hi) else iv.hi) for iv in p.intervals]
    kind = p.kind

    if kind == "c":
        return B.G(k, psi)
    if kind == "d":
        return B.G(k, B.Implies(psi1, psi2))
    if kind == "b":
        return B.G(k, B.Implies(psi1, B.G(math.inf, psi2)))

    a, b = ivs[0]
    if kind == "e" and p.psi is None:
        _require(a <= b <= k, kind, "a <= b <= k", {"a": a, "b": b, "k": k})
        return B.X(a, B.G(b - a, B.Implies(psi1, psi2)))
    if kind == "i":
        _require(a <= b <= k, kind, "a <= b <= k", {"a": a, "b": b, "k": k})
        return B.RunPred("occ", (p.psi,), a, b, "<=", p.n, bindings)
    if kind == "k":
        (a1, c), (c2, b2) = ivs[1], ivs[2]
        _require(a1 == a and c2 == c and b2 == b, kind,
                 "intervals [a, b], [a, c], [c, b]", {"a": a, "b": b, "c": c})
        _require(a <= c <= b <= k, kind, "a <= c <= b <= k", {"a": a, "b": b, "c": c, "k": k})
        trigger = B.X(a, B.G(b - a, psi))
        if split == EXISTS_SPLIT:
            return B.Implies(trigger, B.RunPred("split", (p.psi1, p.psi2), a, b, bindings=bindings))
        if split != TABLE_SPLIT:
            raise TranslationError(f"unknown split reading {split!r}")
        return B.Implies(trigger, B.And((B.X(a, B.G(c - a, psi1)), B.X(c, B.G(b - c, psi2)))))

    _require(a <= b <= k, kind, "a <= b <= k", {"a": a, "b": b, "k": k})
    if kind == "a":
        return B.G(k - b, B.Implies(psi1, B.X(a, B.G(b - a, psi2))))
    if kind == "e":
        return B.G(k - b, B.Implies(psi, B.X(a, B.G(b - a, B.Implies(psi1, psi2)))))
    if kind == "f":
        return B.G(k - b, B.Implies(psi1, B.X(a, B.G(b - a, B.Not(psi2)))))
    if kind == "g":
        return B.G(k - b, B.Implies(psi1, B.X(a, B.F(b - a, psi2))))
    if kind == "h":
        count = B.RunPred("occ", (p.psi1,), a, b, ">=", p.n, bindings)
        return B.Implies(count, B.X(b, B.F(k - b, psi2)))
    if kind == "j":
        return B.Implies(B.X(a, B.G(b - a, psi1)), B.X(b, psi2))
    raise TranslationError(f"unknown pattern kind {kind!r}")


def translate_property(prop, k: float, bindings=(), split: str = TABLE_SPLIT):
    """Translate an already unfolded property."""
    if isinstance(prop, A.Pattern):
        return translate_pattern(prop, k, bindings, split)
    if isinstance(prop, A.OclProp):
        if A.has_path_ops(prop.expr):
            return B.RunPred(B.aggregate_kind(prop.expr), (prop.expr,), 0.0, k, bindings=tuple(bindings))
        return _leaf(prop.expr, tuple(bindings))
    if isinstance(prop, (A.Conj, A.Disj)):
        parts = tuple(translate_property(p, k, bindings, split) for p in prop.items)
        if len(parts) == 1:
            return parts[0]
        if isinstance(prop, A.Conj):
            return B.And(parts) if parts else B.TRUE
        return B.Or(parts) if parts else B.FALSE
    if isinstance(prop, A.Quantified):
        raise TranslationError("quantified property must be unfolded before translation")
    raise TypeError(f"not a property: {prop!r}")


def translate_contract(c: A.Contract, k: float, model, split: str = TABLE_SPLIT,
                       simplify: bool = False):
    """``A' -> P'`` for contract ``(A, P)``; just ``P'`` when there is no assumption."""
    goal = translate_property(unfold(c.goal, model), k, split=split)
    phi = goal
    if c.assumption is not None:
        phi = B.Implies(translate_property(unfold(c.assumption, model), k, split=split), goal)
    return B.remove_zero_next(phi) if simplify else phi
