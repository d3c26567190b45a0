"""Pretty-printer whose output re-parses to the same tree."""
from __future__ import annotations

import dataclasses

from ..units import format_time
from . import ast as A

_BINARY_PREC = {"implies": 1, "or": 2, "and": 3, "+": 6, "-": 6, "*": 7, "/": 7}
_BINARY_PREC.update({op: 5 for op in A.COMPARE_OPS})
_ATOM = 9


def _prec(e) -> int:
    if isinstance(e, A.Binary):
        return _BINARY_PREC[e.op]
    if isinstance(e, A.Unary):
        return 4 if e.op == "not" else 8
    return _ATOM


def _paren(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


def print_expr(e) -> str:
    if isinstance(e, A.Num):
        return str(e.value) if isinstance(e.value, int) else repr(float(e.value))
    if isinstance(e, A.Bool):
        return "true" if e.value else "false"
    if isinstance(e, A.EnumLit):
        return f"#{e.name}"
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Nav):
        return f"{_paren(print_expr(e.target), _prec(e.target) < _ATOM)}.{e.name}"
    if isinstance(e, A.CollOp):
        return f"{_paren(print_expr(e.target), _prec(e.target) < _ATOM)}->{e.op}()"
    if isinstance(e, A.Iterate):
        target = _paren(print_expr(e.target), _prec(e.target) < _ATOM)
        head = f"{e.var} | " if e.var is not None else ""
        return f"{target}->{e.kind}({head}{print_expr(e.body)})"
    if isinstance(e, A.Unary):
        inner = print_expr(e.operand)
        if e.op == "not":
            return "not " + _paren(inner, _prec(e.operand) < 4)
        nested_minus = isinstance(e.operand, A.Unary) and e.operand.op == "-"
        return "-" + _paren(inner, _prec(e.operand) < 8 or nested_minus)
    if isinstance(e, A.Binary):
        p = _BINARY_PREC[e.op]
        compare = e.op in A.COMPARE_OPS
        left = _paren(print_expr(e.left), _prec(e.left) < p or (compare and _prec(e.left) == p))
        right = _paren(print_expr(e.right), _prec(e.right) <= p)
        return f"{left} {e.op} {right}"
    if isinstance(e, A.PathOp):
        return f"{e.kind}({print_expr(e.expr)})"
    if isinstance(e, A.At):
        return f"at({print_expr(e.expr)}, {format_time(e.time)})"
    raise TypeError(f"not an OCL expression: {e!r}")


def print_interval(iv: A.TimeInterval) -> str:
    open_ = "[" if iv.lo_closed else "("
    close = "]" if iv.hi_closed else ")"
    return f"{open_}{format_time(iv.lo)} - {format_time(iv.hi)}{close}"


def print_pattern(p: A.Pattern) -> str:
    def s(e):
        return f"[{print_expr(e)}]"

    iv = [print_interval(i) for i in p.intervals]
    k = p.kind
    if k == "a":
        return f"whenever {s(p.psi1)} occurs {s(p.psi2)} holds during following {iv[0]}"
    if k == "b":
        return f"{s(p.psi1)} implies {s(p.psi2)} holds forever"
    if k == "c":
        return f"always {s(p.psi)}"
    if k == "d":
        return f"whenever {s(p.psi1)} occurs {s(p.psi2)} holds"
    if k == "e":
        tail = f"{s(p.psi1)} implies {s(p.psi2)} during following {iv[0]}"
        return tail if p.psi is None else f"whenever {s(p.psi)} occurs {tail}"
    if k == "f":
        return f"whenever {s(p.psi1)} occurs {s(p.psi2)} does not occur during following {iv[0]}"
    if k == "g":
        return f"whenever {s(p.psi1)} occurs {s(p.psi2)} occurs within {iv[0]}"
    if k == "h":
        return f"{s(p.psi1)} occurs [{p.n}] times during {iv[0]} raises {s(p.psi2)}"
    if k == "i":
        return f"{s(p.psi)} occurs at most [{p.n}] times during {iv[0]}"
    if k == "j":
        return f"{s(p.psi1)} during {iv[0]} raises {s(p.psi2)}"
    if k == "k":
        return (f"{s(p.psi)} during {iv[0]} implies {s(p.psi1)} during {iv[1]} "
                f"then {s(p.psi2)} during {iv[2]}")
    raise ValueError(f"unknown pattern kind {k!r}")


def print_property(prop) -> str:
    if isinstance(prop, A.Pattern):
        return print_pattern(prop)
    if isinstance(prop, A.OclProp):
        return print_expr(prop.expr)
    if isinstance(prop, A.Quantified):
        coll = print_expr(prop.collection)
        return f"{coll}->{prop.kind}({prop.var} | {print_property(prop.body)})"
    if isinstance(prop, (A.Conj, A.Disj)):
        # only produced by unfolding; readable, not meant to be re-parsed
        joiner = " and " if isinstance(prop, A.Conj) else " or "
        return joiner.join(f"({print_property(item)})" for item in prop.items)
    raise TypeError(f"not a property: {prop!r}")


def print_contract(c: A.Contract) -> str:
    head = " ".join(c.viewpoints + ("contract", c.name))
    lines = [head]
    if c.assumption is not None:
        lines.append(f"  Assumption: {print_property(c.assumption)}")
    lines.append(f"  Goal: {print_property(c.goal)}")
    lines.append(f"  Confidence: {c.confidence!r}")
    return "\n".join(lines) + "\n"


def dump_tree(node, indent: int = 0) -> str:
    """Indented structural dump of any syntax tree (the CLI ``parse`` output)."""
    pad = "  " * indent
    if dataclasses.is_dataclass(node):
        lines = [f"{pad}{type(node).__name__}"]
        for f in dataclasses.fields(node):
            value = getattr(node, f.name)
            if dataclasses.is_dataclass(value) or (isinstance(value, tuple) and value
                                                   and dataclasses.is_dataclass(value[0])):
                lines.append(f"{pad}  {f.name}:")
                lines.append(dump_tree(value, indent + 2))
            else:
                lines.append(f"{pad}  {f.name}: {value!r}")
        return "\n".join(lines)
    if isinstance(node, (tuple, list)):
        return "\n".join(dump_tree(item, indent) for item in node)
    return f"{pad}{node!r}"
