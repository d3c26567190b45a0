"""Offline checking of bounded LTL formulas on finite timed traces.

Every temporal operator is evaluated on the suffix starting at sample ``i``
with ``t_i`` as its local origin; bounds are inclusive.  Each node is
evaluated as a boolean vector over sample indices, but only at the indices
its context actually inspects (so an OCL fault at an irrelevant state
cannot abort a check).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bltl as B
from .errors import MonitorError, OclError, TraceTooShort
from .ocl import eval_arith, eval_bool, evaluate
from .syntax import ast as A
from .units import format_time

TABLE = "table"
STANDARD = "standard"
_TOL = 1e-9


@dataclass(frozen=True)
class Verdict:
    holds: bool
    time: Optional[float] = None  # first violating (or witnessing) sample time
    path: str = ""  # subformula that decided the verdict

    def __bool__(self):
        return self.holds


def _label(phi) -> str:
    if isinstance(phi, B.Temporal):
        return f"{phi.op}<={format_time(phi.bound)}"
    if isinstance(phi, B.Until):
        return f"{phi.op}<={format_time(phi.bound)}"
    if isinstance(phi, B.RunPred):
        return f"{phi.kind}[{format_time(phi.lo)}, {format_time(phi.hi)}]"
    return type(phi).__name__


def _at_times(expr):
    return [n.time for n in A.walk(expr) if isinstance(n, A.At)]


def _own_reach(phi) -> float:
    if isinstance(phi, (B.Temporal, B.Until)):
        return 0.0 if math.isinf(phi.bound) else phi.bound
    if isinstance(phi, B.RunPred):
        reach = 0.0 if math.isinf(phi.hi) else phi.hi
        for e in phi.exprs:
            reach = max([reach, *_at_times(e)])
        return reach
    return 0.0


def check_horizon(phi, available: float):
    """Raise :class:`TraceTooShort` naming the first operator whose bound overruns."""
    def visit(node, used, path):
        total = used + _own_reach(node)
        here = path + (_label(node),) if _own_reach(node) else path
        if total > available + _TOL * max(1.0, abs(available)):
            raise TraceTooShort(
                f"{_label(node)} (via {' / '.join(here) or 'root'}) needs the trace to cover "
                f"{format_time(total)} time units but it covers {format_time(available)}",
                required=total, available=available)
        for child in B.subformulas(node):
            visit(child, total, here)

    visit(phi, 0.0, ())


class _Run:
    """Per-check evaluation context over one trace."""

    def __init__(self, trace, model, weak_until):
        self.trace = trace
        self.model = model
        self.weak_until = weak_until
        self.times = np.asarray(trace.times, dtype=float)
        self.n = len(self.times)
        self.idx = np.arange(self.n)
        self._hi = {}
        self._pred_cache = {}

    # -- index helpers ----------------------------------------------------

    def last_within(self, bound):
        """For each i, the largest j with t_j <= t_i + bound."""
        if math.isinf(bound):
            return np.full(self.n, self.n - 1)
        if bound not in self._hi:
            self._hi[bound] = np.searchsorted(self.times, self.times + bound, side="right") - 1
        return self._hi[bound]

    def window(self, i, lo, hi):
        """Sample indices covering [t_i + lo, t_i + hi]: the one in force at the start, then later ones."""
        start = self.times[i] + lo
        end = self.times[-1] if math.isinf(hi) else self.times[i] + hi
        if end > self.times[-1] + _TOL * max(1.0, abs(self.times[-1])):
            raise MonitorError(f"window [{format_time(start)}, {format_time(end)}] leaves the trace")
        first = int(np.searchsorted(self.times, start, side="right")) - 1
        last = int(np.searchsorted(self.times, end, side="right")) - 1
        return range(max(first, 0), last + 1)

    def spread(self, needed, hi):
        """Mark every index in [i, hi[i]] for each needed i."""
        out = np.zeros(self.n + 1, dtype=np.int64)
        rows = np.flatnonzero(needed)
        np.add.at(out, rows, 1)
        np.add.at(out, hi[rows] + 1, -1)
        return np.cumsum(out[:-1]) > 0

    def next_true(self, v):
        """For each i, the smallest j >= i with v[j], or n if none."""
        marks = np.where(v, self.idx, self.n)
        return np.minimum.accumulate(marks[::-1])[::-1]

    # -- evaluation ---------------------------------------------------------

    def eval(self, phi, needed):
        if not needed.any():
            return np.zeros(self.n, dtype=bool)
        if isinstance(phi, B.Const):
            return np.full(self.n, phi.value, dtype=bool)
        if isinstance(phi, B.StatePred):
            return self.state_pred(phi, needed)
        if isinstance(phi, B.RunPred):
            out = np.zeros(self.n, dtype=bool)
            for i in np.flatnonzero(needed):
                out[i] = self.run_pred(phi, int(i))
            return out
        if isinstance(phi, B.Not):
            return ~self.eval(phi.arg, needed)
        if isinstance(phi, B.And):
            out = np.ones(self.n, dtype=bool)
            for arg in phi.args:
                out &= self.eval(arg, needed & out)
            return out
        if isinstance(phi, B.Or):
            out = np.zeros(self.n, dtype=bool)
            for arg in phi.args:
                out |= self.eval(arg, needed & ~out)
            return out
        if isinstance(phi, B.Implies):
            left = self.eval(phi.left, needed)
            return ~left | self.eval(phi.right, needed & left)
        if isinstance(phi, B.Temporal):
            hi = self.last_within(phi.bound)
            if phi.op == "X":
                inner = np.zeros(self.n, dtype=bool)
                inner[hi[needed]] = True
                return self.eval(phi.arg, inner)[hi]
            v = self.eval(phi.arg, self.spread(needed, hi))
            if phi.op == "F":
                return self.next_true(v) <= hi
            return self.next_true(~v) > hi
        if isinstance(phi, B.Until):
            hi = self.last_within(phi.bound)
            span = self.spread(needed, hi)
            left = self.eval(phi.left, span)
            right = self.eval(phi.right, span)
            first_right = self.next_true(right)
            strong = (first_right <= hi) & (self.next_true(~left) >= first_right)
            if phi.op == "U":
                return strong
            fallback = right if self.weak_until == TABLE else left
            return strong | (self.next_true(~fallback) > hi)
        raise TypeError(f"not a B-LTL formula: {phi!r}")

    def state_pred(self, phi, needed):
        key = (phi.expr, phi.bindings)
        cache = self._pred_cache.setdefault(key, {})
        bindings = dict(phi.bindings)
        out = np.zeros(self.n, dtype=bool)
        for i in np.flatnonzero(needed):
            i = int(i)
            if i not in cache:
                cache[i] = eval_bool(phi.expr, self.trace[i], bindings, self.model)
            out[i] = cache[i]
        return out

    def truth_at(self, expr, bindings, i):
        return eval_bool(expr, self.trace[i], bindings, self.model)

    def run_pred(self, phi, i):
        bindings = dict(phi.bindings)
        if phi.kind == "occ":
            count = occurrences(self, phi.exprs[0], bindings, i, phi.lo, phi.hi)
            return _compare(count, phi.op, phi.n)
        if phi.kind == "split":
            return self.split(phi, bindings, i)
        expr = phi.exprs[0]
        values = {}
        for node in A.walk(expr):
            if isinstance(node, A.PathOp):
                values[id(node)] = aggregate(self, node.kind, node.expr, bindings, i, phi.lo, phi.hi)
            elif isinstance(node, A.At):
                t = self.times[i] + node.time
                if t > self.times[-1] + _TOL * max(1.0, abs(self.times[-1])):
                    raise MonitorError(f"at(..., {format_time(node.time)}) leaves the trace")
                j = int(np.searchsorted(self.times, t, side="right")) - 1
                values[id(node)] = evaluate(node.expr, self.trace[j], bindings, self.model)
        return eval_bool(expr, self.trace[i], bindings, self.model, values)

    def split(self, phi, bindings, i):
        psi1, psi2 = phi.exprs
        win = list(self.window(i, phi.lo, phi.hi))
        head = [self.truth_at(psi1, bindings, j) for j in win]
        tail = [self.truth_at(psi2, bindings, j) for j in win]
        for p in range(len(win)):
            if all(head[: p + 1]) and all(tail[p:]):
                return True
        return False


def _compare(x, op, y) -> bool:
    return {"<": x < y, "<=": x <= y, "=": x == y, "<>": x != y, ">=": x >= y, ">": x > y}[op]


def occurrences(run: _Run, psi, bindings, i, lo, hi) -> int:
    """Rising edges of ``psi`` inside [t_i + lo, t_i + hi]; holding at the window start counts once."""
    count, before = 0, False
    for j in run.window(i, lo, hi):
        now = run.truth_at(psi, bindings, j)
        if now and not before:
            count += 1
        before = now
    return count


def aggregate(run: _Run, kind, expr, bindings, i, lo, hi):
    values = [eval_arith(expr, run.trace[j], bindings, run.model) for j in run.window(i, lo, hi)]
    if not values:
        raise MonitorError(f"{kind}() over an empty window")
    if kind == "sum":
        return sum(values)
    if kind == "prod":
        return math.prod(values)
    return sum(values) / len(values)


def occ(psi, a, b, trace, model=None, bindings=None, start=0) -> int:
    """Occurrence count of the state predicate ``psi`` in ``[a, b]`` after sample ``start``."""
    return occurrences(_Run(trace, model, TABLE), psi, dict(bindings or {}), start, a, b)


def run_aggregate(kind, expr, trace, lo, hi, model=None, bindings=None, start=0):
    """``mean``/``sum``/``prod`` of ``expr`` over the window, or ``at`` (value at ``t_start + lo``)."""
    run = _Run(trace, model, TABLE)
    if kind == "at":
        t = run.times[start] + lo
        return evaluate(expr, trace.state_at(t), dict(bindings or {}), model)
    if kind not in ("mean", "sum", "prod"):
        raise MonitorError(f"unknown aggregate {kind!r}")
    return aggregate(run, kind, expr, dict(bindings or {}), start, lo, hi)


def _explain(run: _Run, phi, i, want, path):
    """Find a sample time and subformula responsible for ``phi`` being ``want`` at index ``i``."""
    one = np.zeros(run.n, dtype=bool)
    one[i] = True
    if isinstance(phi, B.And) and not want or isinstance(phi, B.Or) and want:
        for k, arg in enumerate(phi.args):
            if bool(run.eval(arg, one)[i]) == want:
                return _explain(run, arg, i, want, f"{path}/{k}")
    if isinstance(phi, B.Implies) and not want:
        return _explain(run, phi.right, i, False, f"{path}/->")
    if isinstance(phi, B.Not):
        return _explain(run, phi.arg, i, not want, f"{path}/!")
    if isinstance(phi, B.Temporal) and phi.op in ("G", "F") and want == (phi.op == "F"):
        hi = run.last_within(phi.bound)[i]
        span = np.zeros(run.n, dtype=bool)
        span[i: hi + 1] = True
        v = run.eval(phi.arg, span)
        for j in range(i, hi + 1):
            if bool(v[j]) == want:
                return _explain(run, phi.arg, j, want, f"{path}/{_label(phi)}")
    return float(run.times[i]), f"{path}/{_label(phi)}"


def check(phi, trace, model=None, weak_until: str = TABLE) -> Verdict:
    """Decide ``trace |= phi`` from the first sample.

    ``weak_until`` selects the meaning of ``W``: ``"table"`` uses
    ``(p U q) | G q``, ``"standard"`` uses ``(p U q) | G p``.
    """
    if weak_until not in (TABLE, STANDARD):
        raise ValueError(f"weak_until must be {TABLE!r} or {STANDARD!r}")
    check_horizon(phi, trace.end - trace.start)
    run = _Run(trace, model, weak_until)
    root = np.zeros(run.n, dtype=bool)
    root[0] = True
    try:
        holds = bool(run.eval(phi, root)[0])
    except OclError as exc:
        raise MonitorError(f"monitoring fault: {exc}") from exc
    if holds:
        return Verdict(True)
    t, path = _explain(run, phi, 0, False, "")
    return Verdict(False, t, path)
