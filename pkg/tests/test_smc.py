import math

import pytest
from hypothesis import given, strategies as st

from gcsl import bltl as B
from gcsl.errors import SmcError
from gcsl.model import load_model
from gcsl.simulate import SimConfig, simulate
from gcsl.monitor import check
from gcsl.smc import (HOLDS, UNDECIDED, VIOLATED, Chernoff, FixedN, ProbContract, chernoff_sample_size,
                      decide, monte_carlo, parse_mode, run_seed, verify_contract)
from gcsl.syntax import parse_contract

from conftest import data_text

HEADS = B.parse_formula("F<=1 {coin.heads}")


def test_true_and_false_formulas(coin_model):
    est = monte_carlo(coin_model, ProbContract(B.TRUE, ">=", 0.9), 1.0, 100, 0)
    assert (est.p_hat, est.successes, est.verdict) == (1.0, 100, HOLDS)
    est = monte_carlo(coin_model, ProbContract(B.FALSE, ">=", 0.1), 1.0, 100, 0)
    assert (est.p_hat, est.verdict) == (0.0, VIOLATED)


def test_estimate_invariants(coin_model):
    est = monte_carlo(coin_model, ProbContract(HEADS, ">=", 0.5), 1.0, 250, 9)
    assert 0 <= est.successes <= est.n == 250
    assert est.p_hat == est.successes / est.n
    assert len(est.seeds) == len(set(est.seeds)) == 250


def test_replay_reproduces_successes(coin_model):
    a = monte_carlo(coin_model, ProbContract(HEADS), 1.0, 300, 4)
    b = monte_carlo(coin_model, ProbContract(HEADS), 1.0, 300, 4)
    assert a == b and a.seeds == b.seeds


def test_parallel_runs_match_serial(coin_model):
    serial = monte_carlo(coin_model, ProbContract(HEADS), 1.0, 200, 8, jobs=1)
    parallel = monte_carlo(coin_model, ProbContract(HEADS), 1.0, 200, 8, jobs=3)
    assert serial.successes == parallel.successes


def test_per_run_seed_replays_that_run(coin_model):
    est = monte_carlo(coin_model, ProbContract(HEADS), 1.0, 40, 12)
    outcomes = [check(HEADS, simulate(coin_model, SimConfig(s, 1.0)), coin_model).holds for s in est.seeds]
    assert sum(outcomes) == est.successes
    assert est.seeds[5] == run_seed(12, 5)


def test_disjoint_blocks_agree_on_the_coin(coin_model):
    a = monte_carlo(coin_model, ProbContract(HEADS), 1.0, 5000, 1)
    b = monte_carlo(coin_model, ProbContract(HEADS), 1.0, 5000, 2)
    assert not set(a.seeds) & set(b.seeds)
    assert abs(a.p_hat - b.p_hat) < 0.03


def test_chernoff_values():
    assert chernoff_sample_size(0.01, 0.05) == 18445
    assert chernoff_sample_size(0.02, 0.01) == math.ceil(math.log(200) / 0.0008)
    assert chernoff_sample_size(0.5, 0.999999) in (1, 2)


@pytest.mark.parametrize("eps,delta", [(0, 0.1), (1, 0.1), (0.1, 0), (0.1, 1), (-0.1, 0.5)])
def test_chernoff_domain(eps, delta):
    with pytest.raises(SmcError):
        chernoff_sample_size(eps, delta)


probs = st.floats(0.001, 0.999)


@given(probs, probs, probs)
def test_chernoff_is_non_increasing(e1, e2, d):
    lo, hi = sorted((e1, e2))
    assert chernoff_sample_size(hi, d) <= chernoff_sample_size(lo, d)
    assert chernoff_sample_size(d, hi) <= chernoff_sample_size(d, lo)


def test_parse_mode():
    assert parse_mode("fixed:200") == FixedN(200)
    assert parse_mode("chernoff:0.01,0.05") == Chernoff(0.01, 0.05)
    for bad in ("fixed:0", "fixed:x", "chernoff:0.1", "sprt:1", "chernoff:2,0.1"):
        with pytest.raises(SmcError):
            parse_mode(bad)


def test_decide():
    assert decide(0.95, ">=", 0.9) == HOLDS
    assert decide(0.85, ">=", 0.9) == VIOLATED
    assert decide(0.905, ">=", 0.9, epsilon=0.01) == UNDECIDED
    assert decide(0.5, "<", 0.6) == HOLDS
    assert decide(0.6, "<=", 0.6) == HOLDS
    assert decide(0.605, "=", 0.6, epsilon=0.01) == HOLDS
    assert decide(0.7, "=", 0.6, epsilon=0.01) == VIOLATED
    with pytest.raises(SmcError, match="epsilon"):
        decide(0.6, "=", 0.6)


@given(st.floats(0, 1), st.sampled_from(("<", "<=", ">=", ">")), st.floats(0, 1))
def test_decide_is_pure(p, rel, t):
    assert decide(p, rel, t) == decide(p, rel, t)
    assert decide(p, rel, t) in (HOLDS, VIOLATED)


def test_prob_contract_validation():
    with pytest.raises(SmcError):
        ProbContract(B.TRUE, "~", 0.5)
    with pytest.raises(SmcError):
        ProbContract(B.TRUE, ">=", 1.5)


def test_verify_true_goal_holds(coin_model):
    c = parse_contract("contract C Goal: always [true] Confidence: 90%")
    est = verify_contract(coin_model, c, 1.0, FixedN(20), 0)
    assert est.verdict == HOLDS and est.threshold == 0.9


def test_failing_run_reports_its_seed():
    model = load_model(data_text("coin.sosm"))
    c = parse_contract("contract C Goal: always [coin.missing] Confidence: 50%")
    with pytest.raises(SmcError) as info:
        verify_contract(model, c, 1.0, FixedN(3), 5)
    assert info.value.seed == run_seed(5, 0)
