import pytest
from hypothesis import given, strategies as st

from gcsl.errors import OclError
from gcsl.model import StateValuation, Symbol, load_model
from gcsl.ocl import Ref, eval_arith, eval_bool, evaluate, format_value
from gcsl.syntax.parser import parse_expr


@pytest.fixture(scope="module")
def state(fire_model):
    s = fire_model.initial_state()
    values = dict(s.values)
    values[("district_2", "fireArea")] = 0.00004
    values[("district_5", "fireArea")] = 0.00003
    values[("fireFightingCar2", "isAtFireStation")] = False
    return StateValuation(0.0, values)


def ev(text, state, model, bindings=None):
    return evaluate(parse_expr(text), state, bindings, model)


def test_collection_navigation_flattens(state, fire_model):
    cars = ev("SoS.itsFireStations.hostedFireFightingCars", state, fire_model)
    assert [c.id for c in cars] == [f"fireFightingCar{i}" for i in range(1, 8)]


def test_size_and_sum(state, fire_model):
    assert ev("SoS.itsDistricts->size()", state, fire_model) == len(fire_model.collection("itsDistricts"))
    assert ev("SoS.itsDistricts.fireArea->sum()", state, fire_model) == pytest.approx(0.00007)


def test_requirement_1_on_the_fire_model(state, fire_model):
    text = ("SoS.itsDistricts->exists(d | d.containedFireStations->size() > 1) implies "
            "SoS.itsDistricts->forAll(d | d.containedFireStations->size() >= 1)")
    assert ev(text, state, fire_model) is True


def test_exists_and_forall_over_cars(state, fire_model):
    assert ev("fireStation_1.hostedFireFightingCars->exists(c | c.isAtFireStation = false)",
              state, fire_model) is True
    assert ev("fireStation_2.hostedFireFightingCars->forAll(c | c.isAtFireStation)",
              state, fire_model) is True


def test_implicit_iterator_shorthand(state, fire_model):
    explicit = ev("fireStation_1.hostedFireFightingCars->forAll(c | c.isAtFireStation)", state, fire_model)
    implicit = ev("fireStation_1.hostedFireFightingCars->forAll(isAtFireStation)", state, fire_model)
    assert explicit == implicit is False


def test_bindings_resolve_variables(state, fire_model):
    assert ev("s.hostedFireFightingCars->size()", state, fire_model, {"s": "fireStation_2"}) == 2


def _nodes(n):
    ids = ", ".join(f"n{i}" for i in range(n))
    return load_model(
        "model: m\ncomponents:\n  Node:\n    attributes:\n      v: {kind: integer, init: 0}\n"
        "    states: [s]\ninstances:\n" + "".join(f"  - {{id: n{i}, type: Node}}\n" for i in range(n))
        + f"collections:\n  xs: [{ids}]\n")


def test_empty_collections():
    model = _nodes(0)
    s = StateValuation(0.0, {})
    assert evaluate(parse_expr("SoS.xs->forAll(v | v.p)"), s, None, model) is True
    assert evaluate(parse_expr("SoS.xs->exists(v | v.p)"), s, None, model) is False
    assert evaluate(parse_expr("SoS.xs.v->sum()"), s, None, model) == 0


def test_arithmetic_and_precedence():
    s = StateValuation(0.0, {("a", "v"): 3})
    assert eval_arith(parse_expr("a.v + 2 * 3 - 4 / 2"), s) == 7
    assert eval_bool(parse_expr("not a.v > 5 or false"), s) is True
    assert eval_bool(parse_expr("a.v = 3 and a.v <> 4"), s) is True


def test_enum_literals():
    s = StateValuation(0.0, {("a", "level"): Symbol("high")})
    assert eval_bool(parse_expr("a.level = #high"), s) is True


@pytest.mark.parametrize("text,message", [
    ("a.v + true", "needs numbers"),
    ("a.v / 0", "division by zero"),
    ("a.nothing", "no attribute"),
    ("a.v = true", "cannot compare"),
    ("a.v->size()", "applied to"),
    ("mean(a.v) > 1", "run-level"),
    ("ghost", "unresolved name"),
])
def test_faults(text, message):
    s = StateValuation(0.0, {("a", "v"): 3})
    with pytest.raises(OclError, match=message):
        evaluate(parse_expr(text), s)


def test_non_boolean_condition():
    with pytest.raises(OclError, match="expected a boolean"):
        eval_bool(parse_expr("a.v"), StateValuation(0.0, {("a", "v"): 1}))


def test_format_value():
    assert format_value(True) == "true"
    assert format_value((Ref("a"), 2)) == "Collection{a, 2}"
    assert format_value(Symbol("x")) == "#x"


@given(st.lists(st.integers(-100, 100), min_size=0, max_size=6))
def test_collection_operations_match_python(values):
    model = _nodes(len(values))
    s = StateValuation(0.0, {(f"n{i}", "v"): v for i, v in enumerate(values)})
    assert evaluate(parse_expr("SoS.xs.v->sum()"), s, None, model) == sum(values)
    assert evaluate(parse_expr("SoS.xs->size()"), s, None, model) == len(values)
    assert evaluate(parse_expr("SoS.xs->exists(n | n.v > 0)"), s, None, model) == any(v > 0 for v in values)
    assert evaluate(parse_expr("SoS.xs->forAll(v >= 0)"), s, None, model) == all(v >= 0 for v in values)
