"""Evaluation of OCL expressions against a single state valuation.

Values are Python ``bool``, ``int``/``float``, :class:`~gcsl.model.Symbol`
(enum literals), :class:`Ref` (component instances) and tuples
(collections).  There is no undefined value: every failure raises
:class:`~gcsl.errors.OclError`.
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from .errors import OclError
from .model import Symbol
from .syntax import ast as A
from .syntax.printer import print_expr


@dataclass(frozen=True)
class Ref:
    id: str


class _Root:
    def __repr__(self):
        return "SoS"


SOS = _Root()

_ORDER = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}
_ARITH = {"+": operator.add, "-": operator.sub, "*": operator.mul}


def is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _kind(v) -> str:
    if isinstance(v, bool):
        return "boolean"
    if is_number(v):
        return "number"
    if isinstance(v, Symbol):
        return "enum"
    if isinstance(v, Ref):
        return "instance"
    if isinstance(v, tuple):
        return "collection"
    return type(v).__name__


class _Env:
    __slots__ = ("state", "bindings", "model", "implicit", "path_values", "_known")

    def __init__(self, state, bindings, model, path_values):
        self.state = state
        self.bindings = bindings or {}
        self.model = model
        self.implicit = ()
        self.path_values = path_values
        self._known = None

    def is_instance(self, name) -> bool:
        if self.model is not None:
            return self.model.instance(name) is not None
        if self._known is None:
            self._known = {i for i, _ in self.state.values}
        return name in self._known

    def member(self, ref: Ref, name):
        values = self.state.values
        key = (ref.id, name)
        if key in values:
            return values[key]
        if self.model is not None:
            inst = self.model.instance(ref.id)
            if inst is not None:
                targets = inst.link(name)
                if targets is not None:
                    return tuple(Ref(t) for t in targets)
        raise OclError(f"{ref.id} has no attribute or link {name!r}")

    def has_member(self, ref: Ref, name) -> bool:
        if (ref.id, name) in self.state.values:
            return True
        if self.model is not None:
            inst = self.model.instance(ref.id)
            return inst is not None and inst.link(name) is not None
        return False


def _ev(e, env: _Env):
    return _DISPATCH[type(e)](e, env)


def _num(e, env):
    return e.value


def _name(e, env):
    n = e.id
    if n in env.bindings:
        return Ref(env.bindings[n])
    if n == "SoS":
        return SOS
    for element in reversed(env.implicit):
        if env.has_member(element, n):
            return env.member(element, n)
    if env.is_instance(n):
        return Ref(n)
    raise OclError(f"unresolved name {n!r}")


def _nav(e, env):
    target = _ev(e.target, env)
    if target is SOS:
        if env.model is None:
            raise OclError(f"SoS.{e.name} needs a model")
        ids = env.model.collection(e.name)
        if ids is None:
            raise OclError(f"unknown collection SoS.{e.name}")
        return tuple(Ref(i) for i in ids)
    if isinstance(target, Ref):
        return env.member(target, e.name)
    if isinstance(target, tuple):
        out = []
        for item in target:
            if not isinstance(item, Ref):
                raise OclError(f"cannot navigate .{e.name} from a collection of {_kind(item)} values")
            value = env.member(item, e.name)
            if isinstance(value, tuple):
                out.extend(value)
            else:
                out.append(value)
        return tuple(out)
    raise OclError(f"cannot navigate .{e.name} from a {_kind(target)} value")


def _coll_op(e, env):
    target = _ev(e.target, env)
    if not isinstance(target, tuple):
        raise OclError(f"->{e.op}() applied to a {_kind(target)} value")
    if e.op == "size":
        return len(target)
    total = 0
    for v in target:
        if not is_number(v):
            raise OclError(f"->sum() over a {_kind(v)} element")
        total += v
    return total


def _iterate(e, env):
    target = _ev(e.target, env)
    if not isinstance(target, tuple):
        raise OclError(f"->{e.kind}() applied to a {_kind(target)} value")
    want_all = e.kind == "forAll"
    for item in target:
        if e.var is not None:
            if not isinstance(item, Ref):
                raise OclError(f"->{e.kind}() iterator bound to a {_kind(item)} value")
            saved = env.bindings
            env.bindings = {**saved, e.var: item.id}
            try:
                result = _truth(_ev(e.body, env), e.body)
            finally:
                env.bindings = saved
        else:
            env.implicit = env.implicit + (item,)
            try:
                result = _truth(_ev(e.body, env), e.body)
            finally:
                env.implicit = env.implicit[:-1]
        if result != want_all:
            return result
    return want_all


def _truth(v, e) -> bool:
    if not isinstance(v, bool):
        raise OclError(f"expected a boolean, got {_kind(v)} from {print_expr(e)}")
    return v


def _unary(e, env):
    v = _ev(e.operand, env)
    if e.op == "not":
        return not _truth(v, e.operand)
    if not is_number(v):
        raise OclError(f"cannot negate a {_kind(v)} value")
    return -v


def _binary(e, env):
    op = e.op
    if op in ("and", "or", "implies"):
        left = _truth(_ev(e.left, env), e.left)
        if op == "and" and not left:
            return False
        if op == "or" and left:
            return True
        if op == "implies" and not left:
            return True
        return _truth(_ev(e.right, env), e.right)
    left, right = _ev(e.left, env), _ev(e.right, env)
    if op in ("=", "<>"):
        lk, rk = _kind(left), _kind(right)
        if lk != rk or lk == "collection":
            raise OclError(f"cannot compare {lk} with {rk} in {print_expr(e)}")
        return (left == right) == (op == "=")
    if not (is_number(left) and is_number(right)):
        raise OclError(f"operator {op} needs numbers, got {_kind(left)} and {_kind(right)} in {print_expr(e)}")
    if op in _ORDER:
        return _ORDER[op](left, right)
    if op == "/":
        if right == 0:
            raise OclError(f"division by zero in {print_expr(e)}")
        return left / right
    return _ARITH[op](left, right)


def _path(e, env):
    if env.path_values is not None and id(e) in env.path_values:
        return env.path_values[id(e)]
    raise OclError(f"{print_expr(e)} is a run-level operator and needs a trace")


_DISPATCH = {
    A.Num: _num, A.Bool: _num, A.EnumLit: lambda e, env: Symbol(e.name), A.Name: _name,
    A.Nav: _nav, A.CollOp: _coll_op, A.Iterate: _iterate, A.Unary: _unary, A.Binary: _binary,
    A.PathOp: _path, A.At: _path,
}


def evaluate(expr, state, bindings=None, model=None, path_values=None):
    """Evaluate ``expr`` and return its raw value.

    ``bindings`` maps variable names to instance ids.  ``path_values`` maps
    ``id(node)`` of run-level operator nodes to precomputed values.
    """
    return _ev(expr, _Env(state, bindings, model, path_values))


def eval_bool(expr, state, bindings=None, model=None, path_values=None) -> bool:
    return _truth(evaluate(expr, state, bindings, model, path_values), expr)


def eval_arith(expr, state, bindings=None, model=None, path_values=None):
    v = evaluate(expr, state, bindings, model, path_values)
    if not is_number(v):
        raise OclError(f"expected a number, got {_kind(v)} from {print_expr(expr)}")
    if isinstance(v, float) and math.isnan(v):
        raise OclError(f"{print_expr(expr)} evaluated to NaN")
    return v


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Ref):
        return v.id
    if isinstance(v, Symbol):
        return f"#{v.name}"
    if isinstance(v, tuple):
        return "Collection{" + ", ".join(format_value(x) for x in v) + "}"
    return repr(v) if isinstance(v, float) else str(v)
