"""System-of-systems models, state valuations and timed traces.

A model document is YAML::

    model: coin
    time_unit: day
    components:
      Coin:
        attributes:
          heads: {kind: boolean, init: false, distribution: bernoulli(0.7)}
        links: []
        states: [waiting, tossed]
        initial: waiting
        transitions:
          - {from: waiting, to: tossed, delay: 0.5, actions: ["heads := draw"]}
    instances:
      - {id: coin, type: Coin}
    collections:
      itsCoins: [coin]

Guards are OCL booleans; ``self`` names the owning instance.  Actions are
``attr := rhs`` where ``rhs`` is an OCL expression, a distribution call, or
``draw`` (redraw from the attribute's own distribution).  Delays are a
number, a distribution call or an OCL arithmetic expression.

A trace document holds one JSON object per line,
``{"t": 0.0, "values": {"coin.heads": false, ...}}``.
"""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

import yaml

from .distributions import Distribution, draw_distribution, parse_distribution
from .errors import GcslError, ModelError, MonitorError, ParseError
from .syntax import ast as A
from .syntax.parser import parse_expr
from .syntax.printer import print_expr
from .units import DEFAULT_UNIT, canonical_unit

KINDS = ("boolean", "integer", "real", "enum")
DRAW = "draw"


@dataclass(frozen=True)
class Symbol:
    """Enum literal; compares by equality only."""

    name: str

    def __str__(self):
        return self.name


# ---------------------------------------------------------------------------
# static structure


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str
    init: object = None
    distribution: Optional[Distribution] = None
    values: tuple = ()

    def default(self):
        return {"boolean": False, "integer": 0, "real": 0.0}.get(
            self.kind, Symbol(self.values[0]) if self.values else None)


@dataclass(frozen=True)
class Action:
    attr: str
    value: object  # OCL expression | Distribution | DRAW


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    guard: Optional[object] = None
    delay: object = 0.0  # float | Distribution | OCL expression
    actions: tuple = ()


@dataclass(frozen=True)
class ComponentType:
    name: str
    attributes: tuple
    states: tuple
    initial: str
    transitions: tuple = ()
    links: tuple = ()

    def attribute(self, name) -> Optional[Attribute]:
        for a in self.attributes:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class Instance:
    id: str
    type: str
    init: tuple = ()  # ((attr, value), ...)
    links: tuple = ()  # ((link, (ids...)), ...)

    def link(self, name):
        for key, targets in self.links:
            if key == name:
                return targets
        return None


@dataclass(frozen=True)
class SosModel:
    name: str
    components: tuple
    instances: tuple
    collections: tuple  # ((name, (ids...)), ...) in declaration order
    time_unit: str = DEFAULT_UNIT
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {
            "types": {c.name: c for c in self.components},
            "instances": {i.id: i for i in self.instances},
            "collections": dict(self.collections),
        }
        object.__setattr__(self, "_index", index)

    def component(self, name) -> ComponentType:
        return self._index["types"][name]

    def instance(self, iid) -> Optional[Instance]:
        return self._index["instances"].get(iid)

    def type_of(self, iid) -> ComponentType:
        return self.component(self._index["instances"][iid].type)

    def collection(self, name):
        return self._index["collections"].get(name)

    @property
    def collection_names(self):
        return tuple(name for name, _ in self.collections)

    def attribute_keys(self):
        """All ``(instance, attribute)`` pairs in declaration order."""
        return [(inst.id, a.name) for inst in self.instances
                for a in self.component(inst.type).attributes]

    def needs_rng(self) -> bool:
        return any(v == DRAW for _, v in self._init_values())

    def _init_values(self):
        for inst in self.instances:
            overrides = dict(inst.init)
            for a in self.component(inst.type).attributes:
                if a.name in overrides:
                    yield a, overrides[a.name]
                elif a.init is not None:
                    yield a, a.init
                else:
                    yield a, a.default()

    def initial_state(self, rng=None) -> "StateValuation":
        """State at time 0; attributes initialised with ``draw`` need ``rng``."""
        values = {}
        keys = self.attribute_keys()
        for key, (attr, value) in zip(keys, self._init_values()):
            if value == DRAW:
                if rng is None:
                    raise ModelError(f"{key[0]}.{key[1]} is initialised by a draw; an RNG is required")
                value = draw_distribution(attr.distribution, rng, integer=attr.kind == "integer")
            elif attr.kind == "enum" and not isinstance(value, Symbol):
                value = Symbol(value)
            values[key] = value
        return StateValuation(0.0, values)


# ---------------------------------------------------------------------------
# dynamic values


@dataclass(frozen=True)
class StateValuation:
    time: float
    values: Mapping

    def __getitem__(self, key):
        return self.values[key]

    def get(self, inst, attr, default=None):
        return self.values.get((inst, attr), default)


@dataclass(frozen=True)
class TimedTrace:
    samples: tuple
    _times: list = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.samples:
            raise MonitorError("a trace needs at least one sample")
        times = [s.time for s in self.samples]
        for a, b in zip(times, times[1:]):
            if not a < b:
                raise MonitorError(f"trace times must strictly increase ({a} then {b})")
        object.__setattr__(self, "_times", times)

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, i):
        return self.samples[i]

    @property
    def times(self):
        return self._times

    @property
    def start(self) -> float:
        return self._times[0]

    @property
    def end(self) -> float:
        return self._times[-1]

    def index_at(self, t: float) -> int:
        """Index of the sample in force at time ``t`` (left-closed intervals)."""
        if not self._times[0] <= t <= self._times[-1]:
            raise MonitorError(f"time {t} outside trace range [{self.start}, {self.end}]")
        return bisect.bisect_right(self._times, t) - 1

    def state_at(self, t: float) -> StateValuation:
        return self.samples[self.index_at(t)]


def state_at(trace: TimedTrace, t: float) -> StateValuation:
    return trace.state_at(t)


# ---------------------------------------------------------------------------
# trace documents


def _json_value(v):
    return v.name if isinstance(v, Symbol) else v


def dump_trace(trace: TimedTrace) -> str:
    lines = []
    for s in trace.samples:
        flat = {f"{i}.{a}": _json_value(v) for (i, a), v in s.values.items()}
        lines.append(json.dumps({"t": s.time, "values": flat}, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def load_trace(text: str) -> TimedTrace:
    samples = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            values = {}
            for key, v in record["values"].items():
                inst, attr = key.rsplit(".", 1)
                values[(inst, attr)] = Symbol(v) if isinstance(v, str) else v
            samples.append(StateValuation(float(record["t"]), values))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"malformed trace record: {exc}", lineno, 1) from None
    return TimedTrace(tuple(samples))


# ---------------------------------------------------------------------------
# model documents


def _parse_rhs(text: str, where: str):
    text = str(text).strip()
    if text == DRAW:
        return DRAW
    dist = parse_distribution(text)
    if dist is not None:
        return dist
    try:
        return parse_expr(text)
    except ParseError as exc:
        raise ModelError(f"{where}: {exc}") from None


def _parse_delay(raw, where: str):
    if isinstance(raw, bool):
        raise ModelError(f"{where}: delay must be a number, distribution or expression")
    if isinstance(raw, (int, float)):
        if raw < 0:
            raise ModelError(f"{where}: negative delay {raw}")
        return float(raw)
    value = _parse_rhs(raw, where)
    if value == DRAW:
        raise ModelError(f"{where}: 'draw' is not a valid delay")
    return value


def _parse_action(text: str, where: str) -> Action:
    if ":=" not in str(text):
        raise ModelError(f"{where}: action {text!r} is not of the form 'attr := value'")
    lhs, rhs = str(text).split(":=", 1)
    lhs = lhs.strip()
    if lhs.startswith("self."):
        lhs = lhs[5:]
    if not lhs.isidentifier():
        raise ModelError(f"{where}: actions may only assign the component's own attributes ({lhs!r})")
    return Action(lhs, _parse_rhs(rhs, where))


def _parse_attribute(name, raw, where) -> Attribute:
    if not isinstance(name, str):
        # YAML reads bare on/off/yes/no keys as booleans
        raise ModelError(f"{where}: attribute name {name!r} is not a string; quote it")
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict):
        raise ModelError(f"{where}: attribute {name!r} must be a mapping")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ModelError(f"{where}: attribute {name!r} has unknown kind {kind!r}")
    dist = None
    if raw.get("distribution") is not None:
        dist = parse_distribution(str(raw["distribution"]))
        if dist is None:
            raise ModelError(f"{where}: attribute {name!r}: malformed distribution {raw['distribution']!r}")
    values = tuple(str(v) for v in raw.get("values", ()))
    attr = Attribute(name, kind, raw.get("init"), dist, values)
    _check_attribute(attr, where)
    return attr


def _check_value(attr: Attribute, value, where):
    if value is None or value == DRAW:
        if value == DRAW and attr.distribution is None:
            raise ModelError(f"{where}: attribute {attr.name!r} initialised by draw but has no distribution")
        return
    ok = {
        "boolean": isinstance(value, bool),
        "integer": isinstance(value, int) and not isinstance(value, bool),
        "real": isinstance(value, (int, float)) and not isinstance(value, bool),
        "enum": str(value) in attr.values,
    }[attr.kind]
    if not ok:
        raise ModelError(f"{where}: value {value!r} does not fit {attr.kind} attribute {attr.name!r}")


def _check_attribute(attr: Attribute, where):
    if attr.kind == "enum" and not attr.values:
        raise ModelError(f"{where}: enum attribute {attr.name!r} declares no values")
    if attr.distribution is not None:
        problem = attr.distribution.problem()
        if problem:
            raise ModelError(f"{where}: attribute {attr.name!r}: {problem}")
        allowed = {"boolean": ("bernoulli",), "integer": ("bernoulli", "uniform"),
                   "real": ("uniform", "exponential", "normal"), "enum": ()}[attr.kind]
        if attr.distribution.kind not in allowed:
            raise ModelError(f"{where}: {attr.distribution.kind} cannot feed {attr.kind} attribute {attr.name!r}")
    _check_value(attr, attr.init, where)


def load_model(source: str) -> SosModel:
    """Parse and validate a model document."""
    try:
        doc = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line, col = (mark.line + 1, mark.column + 1) if mark else (None, None)
        raise ParseError(f"malformed model document: {getattr(exc, 'problem', exc)}", line, col) from None
    if not isinstance(doc, dict):
        raise ModelError("model document must be a mapping")
    try:
        return _build_model(doc)
    except GcslError:
        raise
    except (TypeError, AttributeError, KeyError) as exc:
        raise ModelError(f"malformed model document: {exc!r}") from None


def _build_model(doc) -> SosModel:
    unit = canonical_unit(str(doc.get("time_unit", DEFAULT_UNIT)))
    components = []
    for cname, raw in (doc.get("components") or {}).items():
        where = f"component {cname}"
        attrs = tuple(_parse_attribute(n, a, where) for n, a in (raw.get("attributes") or {}).items())
        states = tuple(str(s) for s in raw.get("states") or ())
        if not states:
            raise ModelError(f"{where}: state machine declares no states")
        initial = str(raw.get("initial", states[0]))
        if initial not in states:
            raise ModelError(f"{where}: initial state {initial!r} is not declared")
        transitions = []
        for n, t in enumerate(raw.get("transitions") or ()):
            twhere = f"{where}, transition {n}"
            src, dst = str(t.get("from")), str(t.get("to"))
            for s in (src, dst):
                if s not in states:
                    raise ModelError(f"{twhere}: undeclared state {s!r}")
            guard = t.get("guard")
            if guard is not None:
                guard = _parse_rhs(guard, twhere + " guard")
                if not isinstance(guard, _EXPR_TYPES):
                    raise ModelError(f"{twhere}: guard must be an OCL expression")
            actions = tuple(_parse_action(a, twhere) for a in t.get("actions") or ())
            transitions.append(Transition(src, dst, guard, _parse_delay(t.get("delay", 0.0), twhere), actions))
        links = tuple(str(x) for x in raw.get("links") or ())
        components.append(ComponentType(str(cname), attrs, states, initial, tuple(transitions), links))

    types = {c.name: c for c in components}
    if len(types) != len(components):
        raise ModelError("duplicate component type name")

    instances, seen = [], set()
    for raw in doc.get("instances") or ():
        iid, tname = str(raw["id"]), str(raw["type"])
        if iid in seen:
            raise ModelError(f"duplicate instance id {iid!r}")
        seen.add(iid)
        if tname not in types:
            raise ModelError(f"instance {iid}: unknown component type {tname!r}")
        ctype = types[tname]
        init = []
        for aname, value in (raw.get("init") or {}).items():
            attr = ctype.attribute(aname)
            if attr is None:
                raise ModelError(f"instance {iid}: undeclared attribute {aname!r}")
            _check_value(attr, value, f"instance {iid}")
            init.append((aname, value))
        links = []
        for lname, targets in (raw.get("links") or {}).items():
            if lname not in ctype.links:
                raise ModelError(f"instance {iid}: undeclared link {lname!r}")
            links.append((lname, tuple(str(x) for x in targets or ())))
        for lname in ctype.links:
            if lname not in dict(links):
                links.append((lname, ()))
        instances.append(Instance(iid, tname, tuple(init), tuple(links)))

    for inst in instances:
        for lname, targets in inst.links:
            for target in targets:
                if target not in seen:
                    raise ModelError(f"instance {inst.id}: link {lname} names unknown instance {target!r}")

    collections = []
    for cname, ids in (doc.get("collections") or {}).items():
        ids = tuple(str(x) for x in ids or ())
        for iid in ids:
            if iid not in seen:
                raise ModelError(f"collection {cname}: unknown instance {iid!r}")
        collections.append((str(cname), ids))

    model = SosModel(str(doc.get("model", "model")), tuple(components), tuple(instances),
                     tuple(collections), unit)
    _check_references(model)
    return model


_EXPR_TYPES = (A.Num, A.Bool, A.EnumLit, A.Name, A.Nav, A.CollOp, A.Iterate, A.Unary, A.Binary,
               A.PathOp, A.At)


# -- reference checking ------------------------------------------------------


def _check_references(model: SosModel):
    for ctype in model.components:
        for n, t in enumerate(ctype.transitions):
            where = f"component {ctype.name}, transition {n}"
            exprs = [t.guard] if t.guard is not None else []
            if isinstance(t.delay, _EXPR_TYPES):
                exprs.append(t.delay)
            for action in t.actions:
                attr = ctype.attribute(action.attr)
                if attr is None:
                    raise ModelError(f"{where}: action assigns undeclared attribute {action.attr!r}")
                if action.value == DRAW and attr.distribution is None:
                    raise ModelError(f"{where}: 'draw' on {action.attr!r}, which has no distribution")
                if isinstance(action.value, Distribution):
                    problem = action.value.problem()
                    if problem:
                        raise ModelError(f"{where}: {problem}")
                if isinstance(action.value, _EXPR_TYPES):
                    exprs.append(action.value)
            if isinstance(t.delay, Distribution) and t.delay.problem():
                raise ModelError(f"{where}: {t.delay.problem()}")
            for e in exprs:
                if A.has_path_ops(e):
                    raise ModelError(f"{where}: run-level operators are not allowed in the model")
                _infer(e, model, {"self": {ctype.name}}, None, where)


def _link_types(model, tname, link):
    out = set()
    for inst in model.instances:
        if inst.type == tname:
            out.update(model.instance(t).type for t in inst.link(link) or ())
    return out


def _member(model, types, name, where):
    """Static type of ``x.name`` for ``x`` ranging over instances of ``types``."""
    result = None
    for tname in types:
        ctype = model.component(tname)
        if ctype.attribute(name) is not None:
            result = ("value", set())
        elif name in ctype.links:
            result = ("coll", (result[1] if result and result[0] == "coll" else set())
                      | _link_types(model, tname, name))
        else:
            raise ModelError(f"{where}: undeclared attribute {name!r} on {tname}")
    return result or ("value", set())


def _infer(e, model, scope, implicit, where):
    """Return ('inst'|'coll'|'sos'|'value'|'unknown', type-names) for ``e``."""
    if isinstance(e, A.Name):
        if e.id in scope:
            return ("inst", scope[e.id])
        if e.id == "SoS":
            return ("sos", set())
        if model.instance(e.id) is not None:
            return ("inst", {model.instance(e.id).type})
        if implicit:
            kind, types = _member(model, implicit, e.id, where)
            return (kind, types)
        raise ModelError(f"{where}: unresolved name {e.id!r}")
    if isinstance(e, A.Nav):
        kind, types = _infer(e.target, model, scope, implicit, where)
        if kind == "sos":
            ids = model.collection(e.name)
            if ids is None:
                raise ModelError(f"{where}: unknown collection SoS.{e.name}")
            return ("coll", {model.instance(i).type for i in ids})
        if kind in ("inst", "coll") and types:
            mkind, mtypes = _member(model, types, e.name, where)
            if kind == "coll" and mkind == "value":
                return ("coll", set())
            return (mkind, mtypes)
        return ("unknown", set())
    if isinstance(e, A.Iterate):
        kind, types = _infer(e.target, model, scope, implicit, where)
        if e.var is not None:
            _infer(e.body, model, {**scope, e.var: types}, implicit, where)
        else:
            _infer(e.body, model, scope, types or None, where)
        return ("value", set())
    for child in A.children(e):
        _infer(child, model, scope, implicit, where)
    return ("value", set())


# -- serialisation -----------------------------------------------------------


def _rhs_text(value) -> str:
    if value == DRAW:
        return DRAW
    if isinstance(value, Distribution):
        return str(value)
    return print_expr(value)


def _plain(value):
    return value.name if isinstance(value, Symbol) else value


def save_model(model: SosModel) -> str:
    """Serialise ``model`` to a document that :func:`load_model` reads back."""
    components = {}
    for c in model.components:
        attrs = {}
        for a in c.attributes:
            entry = {"kind": a.kind}
            if a.init is not None:
                entry["init"] = _plain(a.init)
            if a.distribution is not None:
                entry["distribution"] = str(a.distribution)
            if a.values:
                entry["values"] = list(a.values)
            attrs[a.name] = entry
        transitions = []
        for t in c.transitions:
            entry = {"from": t.source, "to": t.target}
            if t.guard is not None:
                entry["guard"] = print_expr(t.guard)
            entry["delay"] = t.delay if isinstance(t.delay, float) else _rhs_text(t.delay)
            if t.actions:
                entry["actions"] = [f"{a.attr} := {_rhs_text(a.value)}" for a in t.actions]
            transitions.append(entry)
        components[c.name] = {"attributes": attrs, "links": list(c.links), "states": list(c.states),
                              "initial": c.initial, "transitions": transitions}
    instances = []
    for inst in model.instances:
        entry = {"id": inst.id, "type": inst.type}
        if inst.init:
            entry["init"] = {k: _plain(v) for k, v in inst.init}
        if inst.links:
            entry["links"] = {k: list(v) for k, v in inst.links}
        instances.append(entry)
    doc = {"model": model.name, "time_unit": model.time_unit, "components": components,
           "instances": instances, "collections": {k: list(v) for k, v in model.collections}}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None, width=100)
