"""Statistical model checking: Monte Carlo estimation over simulated runs.

Run ``r`` of a batch seeded with ``seed`` simulates with its own seed
``run_seed(seed, r)``, derived through ``numpy.random.SeedSequence`` from
the pair ``(seed, r)``.  Passing that value to a single simulation replays
the run exactly, and the runs of a batch use independent streams.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GcslError, SmcError
from .monitor import TABLE, check
from .simulate import SimConfig, simulate
from .translate import TABLE_SPLIT, translate_contract

RELATIONS = ("<", "<=", "=", ">=", ">")
HOLDS, VIOLATED, UNDECIDED = "holds", "violated", "undecided"


@dataclass(frozen=True)
class ProbContract:
    formula: object
    relation: str = ">="
    threshold: float = 0.0

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise SmcError(f"unknown relation {self.relation!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise SmcError(f"threshold {self.threshold} outside [0, 1]")


@dataclass(frozen=True)
class FixedN:
    n: int

    def sample_size(self) -> int:
        return self.n


@dataclass(frozen=True)
class Chernoff:
    epsilon: float
    delta: float

    def sample_size(self) -> int:
        return chernoff_sample_size(self.epsilon, self.delta)


@dataclass(frozen=True)
class Estimate:
    n: int
    successes: int
    p_hat: float
    relation: str
    threshold: float
    verdict: str
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    seed: Optional[int] = None
    seeds: tuple = field(default=(), repr=False)


def chernoff_sample_size(epsilon: float, delta: float) -> int:
    """Runs needed so that ``P(|p_hat - p| >= epsilon) <= delta`` (additive Hoeffding bound)."""
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise SmcError(f"epsilon and delta must lie in (0, 1), got {epsilon}, {delta}")
    return math.ceil(math.log(2 / delta) / (2 * epsilon ** 2))


def parse_mode(text: str):
    """``fixed:N`` or ``chernoff:EPS,DELTA``."""
    kind, _, rest = text.partition(":")
    try:
        if kind == "fixed":
            n = int(rest)
            if n < 1:
                raise ValueError
            return FixedN(n)
        if kind == "chernoff":
            eps, delta = (float(x) for x in rest.split(","))
            chernoff_sample_size(eps, delta)
            return Chernoff(eps, delta)
    except (ValueError, SmcError):
        pass
    raise SmcError(f"malformed mode {text!r}; expected fixed:N or chernoff:EPS,DELTA")


def decide(p_hat: float, relation: str, threshold: float, epsilon: Optional[float] = None) -> str:
    """Verdict of ``p_hat ~ threshold``; within ``epsilon`` of the threshold it is undecided."""
    if relation == "=":
        if epsilon is None:
            raise SmcError("the '=' relation needs a precision epsilon (use chernoff mode)")
        return HOLDS if abs(p_hat - threshold) <= epsilon else VIOLATED
    if epsilon is not None and abs(p_hat - threshold) < epsilon:
        return UNDECIDED
    ok = {"<": p_hat < threshold, "<=": p_hat <= threshold,
          ">=": p_hat >= threshold, ">": p_hat > threshold}[relation]
    return HOLDS if ok else VIOLATED


def run_seed(seed: int, run: int) -> int:
    words = np.random.SeedSequence([int(seed), int(run)]).generate_state(2, np.uint32)
    return int(words[0]) << 32 | int(words[1])


def _run_block(model, formula, horizon, seeds, weak_until):
    outcomes = []
    for s in seeds:
        try:
            trace = simulate(model, SimConfig(s, horizon))
            outcomes.append(check(formula, trace, model, weak_until).holds)
        except GcslError as exc:
            raise SmcError(f"run with seed {s} failed: {exc}", seed=s) from None
    return outcomes


def monte_carlo(model, contract: ProbContract, horizon: float, n: int, seed: int,
                jobs: int = 1, epsilon: Optional[float] = None, delta: Optional[float] = None,
                weak_until: str = TABLE) -> Estimate:
    """Estimate ``P(run |= formula)`` from ``n`` simulations and decide the contract."""
    if n < 1:
        raise SmcError("the number of runs must be at least 1")
    seeds = [run_seed(seed, r) for r in range(n)]
    jobs = max(1, min(jobs or os.cpu_count() or 1, n))
    if jobs == 1:
        outcomes = _run_block(model, contract.formula, horizon, seeds, weak_until)
    else:
        size = math.ceil(n / jobs)
        blocks = [seeds[i:i + size] for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_block, model, contract.formula, horizon, b, weak_until)
                       for b in blocks]
            outcomes = [o for f in futures for o in f.result()]
    successes = sum(outcomes)
    p_hat = successes / n
    return Estimate(n, successes, p_hat, contract.relation, contract.threshold,
                    decide(p_hat, contract.relation, contract.threshold, epsilon),
                    epsilon, delta, seed, tuple(seeds))


def verify_contract(model, contract, k: float, mode, seed: int, jobs: int = 1,
                    relation: str = ">=", split: str = TABLE_SPLIT,
                    weak_until: str = TABLE) -> Estimate:
    """Translate a GCSL contract and estimate whether ``P(A -> G) >= confidence``."""
    formula = translate_contract(contract, k, model, split=split)
    pc = ProbContract(formula, relation, contract.confidence)
    eps = getattr(mode, "epsilon", None)
    delta = getattr(mode, "delta", None)
    return monte_carlo(model, pc, k, mode.sample_size(), seed, jobs, eps, delta, weak_until)
