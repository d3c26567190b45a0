import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from gcsl import bltl as B
from gcsl.errors import TranslationError
from gcsl.monitor import check
from gcsl.syntax import ast as A
from gcsl.syntax import parse_contract, parse_pattern, parse_property
from gcsl.syntax.parser import parse_expr
from gcsl.translate import (EXISTS_SPLIT, static_collection, translate_contract, translate_pattern,
                            translate_property, unfold, unfold_expr)

from conftest import data_text, make_trace
from oracles import quantified_holds, random_model, random_model_trace, random_quantified
from patterns_fixtures import INVALID, K, VALID


@pytest.mark.parametrize("kind", sorted(VALID))
def test_pattern_templates(kind):
    text, expected = VALID[kind]
    p = parse_pattern(text)
    assert p.kind == kind
    phi = translate_pattern(p, K)
    assert B.format_formula(phi) == expected
    assert B.parse_formula(expected) == phi


@pytest.mark.parametrize("kind", sorted(INVALID))
def test_pattern_rejections(kind):
    text, error = INVALID[kind]
    with pytest.raises(error):
        translate_pattern(parse_pattern(text), K)


def test_short_form_of_e():
    phi = translate_pattern(parse_pattern("[s.p] implies [s.q] during following [2 - 5]"), K)
    assert B.format_formula(phi) == "X<=2 G<=3 ({s.p} -> {s.q})"


def test_infinite_interval_end_becomes_k():
    p = parse_pattern("whenever [s.p] occurs [s.q] holds during following [1 - inf]")
    assert translate_pattern(p, K) == B.G(0, B.Implies(
        B.StatePred(parse_expr("s.p")), B.X(1, B.G(9, B.StatePred(parse_expr("s.q"))))))


@pytest.mark.parametrize("k", [0.0, -1.0, float("inf")])
def test_bad_horizon(k):
    with pytest.raises(TranslationError, match="positive finite"):
        translate_pattern(parse_pattern("always [s.p]"), k)


def test_exists_split_reading():
    p = parse_pattern(VALID["k"][0])
    phi = translate_pattern(p, K, split=EXISTS_SPLIT)
    assert B.format_formula(phi) == "X<=0 G<=6 {s.r} -> split({s.p}, {s.q}, 0, 6)"
    # p holds through 3, q from 3 on: the fixed switch at 2 fails, a switch at 3 succeeds
    tr = make_trace([0, 1, 2, 3, 4, 6, 10], r=[True] * 7,
                    p=[True, True, True, True, False, False, False],
                    q=[False, False, False, True, True, True, True])
    assert not check(translate_pattern(p, K), tr).holds
    assert check(phi, tr).holds


def test_requirement_3_unfolds_per_station(fire_model):
    c = parse_contract(data_text("req3.gcsl"))
    phi = translate_contract(c, 210.0, fire_model)
    assert isinstance(phi, B.And) and len(phi.args) == 3
    sizes = []
    for conj in phi.args:
        assert conj.op == "G" and conj.bound == 30
        trigger, response = conj.arg.left, conj.arg.right
        assert response.op == "X" and response.bound == 0
        assert response.arg.op == "F" and response.arg.bound == 180
        sizes.append(B.format_formula(trigger).count(" or ") + 1)
    assert sizes == [3, 2, 2]


def test_simplify_drops_zero_next(fire_model):
    c = parse_contract(data_text("req3.gcsl"))
    text = B.format_formula(translate_contract(c, 210.0, fire_model, simplify=True))
    assert "X<=0" not in text and "F<=180" in text


def test_assumption_becomes_an_implication():
    c = parse_contract("contract C Assumption: always [s.p] Goal: always [s.q] Confidence: 90%")
    phi = translate_contract(c, 5.0, None)
    assert B.format_formula(phi) == "G<=5 {s.p} -> G<=5 {s.q}"


def test_structural_goal_is_a_state_predicate(fire_model):
    reqs = {c.name: c for c in
            (parse_contract(chunk) for chunk in data_text("reqs.gcsl").split("\n\n") if "contract" in chunk)}
    phi = translate_contract(reqs["req1"], 120.0, fire_model)
    assert isinstance(phi, B.StatePred)
    run = translate_contract(reqs["req2"], 120.0, fire_model)
    assert isinstance(run, B.RunPred) and run.kind == "mean" and (run.lo, run.hi) == (0.0, 120.0)


def test_static_collections(fire_model):
    assert static_collection(parse_expr("SoS.itsFireStations.hostedFireFightingCars"), fire_model) == tuple(
        f"fireFightingCar{i}" for i in range(1, 8))
    assert static_collection(parse_expr("SoS.itsDistricts.fireArea"), fire_model) is None
    with pytest.raises(TranslationError, match="unresolved collection"):
        static_collection(parse_expr("SoS.nothing"), fire_model)


def test_implicit_iterator_unfolds_to_navigation(fire_model):
    e = unfold_expr(parse_expr("fireStation_2.hostedFireFightingCars->forAll(isAtFireStation)"), fire_model)
    assert e == parse_expr("fireFightingCar4.isAtFireStation and fireFightingCar5.isAtFireStation")


def test_empty_quantifier_unfolds_to_constant():
    model = random_model(random.Random(0))
    e = unfold_expr(parse_expr("SoS.none->exists(x | x.p)"), _with_empty(model))
    assert e == A.Bool(False)


def _with_empty(model):
    return replace(model, collections=model.collections + (("none", ()),))


def test_nesting_limit_is_enforced_before_translation():
    inner = A.Pattern("c", psi=parse_expr("SoS.all->exists(z | z.p)"))
    prop = A.Quantified("forAll", parse_expr("SoS.all"), "x",
                        A.Quantified("forAll", parse_expr("x.nb"), "y", inner))
    with pytest.raises(TranslationError, match="nesting depth 3"):
        unfold(prop, random_model(random.Random(1)))


def test_quantified_must_be_unfolded():
    with pytest.raises(TranslationError):
        translate_property(parse_property("SoS.all->forAll(x | always [x.p])"), 3.0)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_unfolding_matches_quantifier_iteration(seed):
    rng = random.Random(seed)
    model = random_model(rng)
    k = rng.choice((2.0, 3.0, 4.0))
    prop = random_quantified(rng, k)
    trace = random_model_trace(rng, model, k)
    expected = quantified_holds(prop, trace, model, k)
    assert check(translate_property(unfold(prop, model), k), trace, model).holds == expected
