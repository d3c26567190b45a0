"""Discrete-event execution of a model's stochastic state machines.

Each instance runs its component's machine.  After every batch of events
the simulator rescans all instances in declaration order: a transition out
of the current state whose guard holds is scheduled (its delay is drawn
once, when it becomes enabled) and a scheduled transition whose guard no
longer holds is cancelled.  The earliest scheduled transition fires next;
ties go to the earlier instance, then the earlier transition.  Firing
applies the actions (all right-hand sides read the pre-firing state),
moves the machine and drops the instance's other pending transitions.

One sample is emitted per instant at which something fired, plus a final
sample at the horizon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Distribution, draw_distribution
from .errors import OclError, SimulationError
from .model import DRAW, StateValuation, Symbol, TimedTrace
from .ocl import eval_arith, eval_bool, evaluate, is_number

__all__ = ["SimConfig", "simulate", "make_rng", "draw_distribution"]


@dataclass(frozen=True)
class SimConfig:
    seed: int
    horizon: float
    max_samples: int = 100_000

    def __post_init__(self):
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise SimulationError(f"horizon must be a positive finite time, got {self.horizon}")
        if self.max_samples < 1:
            raise SimulationError("max_samples must be positive")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def _coerce(attr, value, where):
    kind = attr.kind
    if kind == "boolean" and isinstance(value, bool):
        return value
    if kind == "real" and is_number(value):
        return float(value)
    if kind == "integer" and is_number(value) and float(value).is_integer():
        return int(value)
    if kind == "enum" and isinstance(value, Symbol) and value.name in attr.values:
        return value
    raise SimulationError(f"{where}: value {value!r} does not fit {kind} attribute {attr.name!r}")


class _Machine:
    def __init__(self, model, rng):
        self.model = model
        self.rng = rng
        self.instances = [(inst, model.component(inst.type)) for inst in model.instances]
        self.control = [ctype.initial for _, ctype in self.instances]
        self.values = dict(model.initial_state(rng).values)
        self.pending = {}  # (instance index, transition index) -> fire time

    def _state(self, now):
        return StateValuation(now, self.values)

    def enabled(self, i, t, now):
        inst, ctype = self.instances[i]
        tr = ctype.transitions[t]
        if tr.source != self.control[i]:
            return False
        if tr.guard is None:
            return True
        try:
            return eval_bool(tr.guard, self._state(now), {"self": inst.id}, self.model)
        except OclError as exc:
            raise SimulationError(f"{inst.id}: guard of transition {t}: {exc}") from None

    def delay(self, i, t, now):
        inst, ctype = self.instances[i]
        dist = ctype.transitions[t].delay
        if isinstance(dist, float):
            d = dist
        elif isinstance(dist, Distribution):
            d = draw_distribution(dist, self.rng)
        else:
            try:
                d = eval_arith(dist, self._state(now), {"self": inst.id}, self.model)
            except OclError as exc:
                raise SimulationError(f"{inst.id}: delay of transition {t}: {exc}") from None
        if not d >= 0:
            raise SimulationError(f"{inst.id}: transition {t} drew a negative delay {d}")
        return now + float(d)

    def rescan(self, now):
        for i, (_, ctype) in enumerate(self.instances):
            for t in range(len(ctype.transitions)):
                key = (i, t)
                on = self.enabled(i, t, now)
                if on and key not in self.pending:
                    self.pending[key] = self.delay(i, t, now)
                elif not on and key in self.pending:
                    del self.pending[key]

    def next_event(self):
        if not self.pending:
            return None
        return min(self.pending.items(), key=lambda kv: (kv[1], kv[0]))

    def fire(self, i, t, now):
        inst, ctype = self.instances[i]
        tr = ctype.transitions[t]
        where = f"{inst.id}: transition {t}"
        state = self._state(now)
        updates = []
        for action in tr.actions:
            attr = ctype.attribute(action.attr)
            if action.value == DRAW:
                value = draw_distribution(attr.distribution, self.rng, integer=attr.kind == "integer")
            elif isinstance(action.value, Distribution):
                value = draw_distribution(action.value, self.rng, integer=attr.kind == "integer")
            else:
                try:
                    value = evaluate(action.value, state, {"self": inst.id}, self.model)
                except OclError as exc:
                    raise SimulationError(f"{where}: {exc}") from None
            updates.append(((inst.id, attr.name), _coerce(attr, value, where)))
        for key, value in updates:
            self.values[key] = value
        self.control[i] = tr.target
        for key in [k for k in self.pending if k[0] == i]:
            del self.pending[key]


def simulate(model, config: SimConfig, rng: np.random.Generator | None = None) -> TimedTrace:
    """Run one simulation over ``[0, config.horizon]``.

    The result depends only on ``(model, config)`` unless an explicit
    ``rng`` is passed.
    """
    rng = rng if rng is not None else make_rng(config.seed)
    m = _Machine(model, rng)
    samples = []
    now = 0.0
    m.rescan(now)
    fired_in_batch = 0
    while True:
        event = m.next_event()
        if event is None or event[1] > config.horizon:
            break
        (i, t), when = event
        if when > now:
            samples.append(StateValuation(now, dict(m.values)))
            now = when
            fired_in_batch = 0
        m.fire(i, t, now)
        fired_in_batch += 1
        if fired_in_batch > config.max_samples or len(samples) >= config.max_samples:
            raise SimulationError(
                f"more than {config.max_samples} samples/events by time {now}: "
                "livelock or too small max_samples")
        m.rescan(now)
    samples.append(StateValuation(now, dict(m.values)))
    if now < config.horizon:
        samples.append(StateValuation(float(config.horizon), dict(m.values)))
    return TimedTrace(tuple(samples))
