import math
import random

import pytest

from gcsl import bltl as B
from gcsl.errors import ParseError
from gcsl.syntax import ast as A

from oracles import random_formula


def sp(name):
    return B.StatePred(A.Nav(A.Name("s"), name))


def test_parse_simple():
    phi = B.parse_formula("G<=5 ({s.a} -> X<=1 F<=2 {s.b})")
    assert phi == B.G(5.0, B.Implies(sp("a"), B.X(1.0, B.F(2.0, sp("b")))))


def test_implication_is_right_associative():
    phi = B.parse_formula("{s.a} -> {s.b} -> {s.c}")
    assert phi == B.Implies(sp("a"), B.Implies(sp("b"), sp("c")))


def test_run_level_atoms():
    phi = B.parse_formula("occ({s.a}, 0, 3) >= 2 & run[0, 4]{mean(s.v) <= 1}")
    occ, run = phi.args
    assert occ.kind == "occ" and (occ.lo, occ.hi, occ.op, occ.n) == (0, 3, ">=", 2)
    assert run.kind == "mean" and run.hi == 4


def test_units_in_bounds():
    assert B.parse_formula("F<=inf {s.a}").bound == math.inf


def test_comment_lines():
    assert B.parse_formula("-- header\n{s.a} -- trailing\n") == sp("a")


@pytest.mark.parametrize("text", ["G<= {s.a}", "{s.a", "F<=1", "{s.a} & ", "occ({s.a}, 0) > 1"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        B.parse_formula(text)


def test_required_horizon():
    phi = B.G(5, B.Implies(sp("a"), B.X(1, B.F(2, sp("b")))))
    assert B.required_horizon(phi) == 8
    assert B.required_horizon(B.G(math.inf, sp("a"))) == 0
    assert B.required_horizon(B.RunPred("occ", (A.Name("x"),), 1, 4, ">=", 1)) == 4


def test_remove_zero_next():
    phi = B.X(0, B.F(3, B.X(0, sp("a"))))
    assert B.remove_zero_next(phi) == B.F(3, sp("a"))


def test_top_level_lines():
    phi = B.And((sp("a"), sp("b")))
    assert B.format_formula(phi, top_level_lines=True) == "{s.a}\n& {s.b}"


def test_format_parse_round_trip():
    rng = random.Random(11)
    for _ in range(2000):
        phi = random_formula(rng, rng.randint(1, 5))
        text = B.format_formula(phi)
        assert B.parse_formula(text) == phi, text
        assert B.parse_formula(B.format_formula(phi, top_level_lines=True)) == phi
