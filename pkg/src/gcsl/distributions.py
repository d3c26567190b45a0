"""Distribution specs attached to stochastic attributes and delays."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import SimulationError

_ARITY = {"uniform": 2, "exponential": 1, "normal": 2, "bernoulli": 1}
_SPEC_RE = re.compile(r"^\s*(uniform|exponential|normal|bernoulli)\s*\(([^()]*)\)\s*$")


@dataclass(frozen=True)
class Distribution:
    kind: str
    params: tuple

    def problem(self) -> str | None:
        """Return a description of invalid parameters, or None."""
        if self.kind not in _ARITY:
            return f"unknown distribution {self.kind!r}"
        if len(self.params) != _ARITY[self.kind]:
            return f"{self.kind} takes {_ARITY[self.kind]} parameter(s), got {len(self.params)}"
        if not all(math.isfinite(p) for p in self.params):
            return f"{self}: parameters must be finite"
        if self.kind == "uniform" and self.params[0] > self.params[1]:
            return f"{self}: lower bound exceeds upper bound"
        if self.kind == "exponential" and self.params[0] <= 0:
            return f"{self}: rate must be > 0"
        if self.kind == "normal" and self.params[1] < 0:
            return f"{self}: sigma must be >= 0"
        if self.kind == "bernoulli" and not 0.0 <= self.params[0] <= 1.0:
            return f"{self}: p must lie in [0, 1]"
        return None

    def __str__(self):
        return f"{self.kind}({', '.join(repr(float(p)) for p in self.params)})"


def parse_distribution(text: str) -> Distribution | None:
    """Parse ``"exponential(0.5)"``; None if ``text`` is not a distribution call."""
    m = _SPEC_RE.match(text)
    if m is None:
        return None
    raw = [p for p in m.group(2).split(",") if p.strip()]
    try:
        params = tuple(float(p) for p in raw)
    except ValueError:
        return None
    return Distribution(m.group(1), params)


def draw_distribution(dist: Distribution, rng: np.random.Generator, integer: bool = False):
    """Draw one value; ``rng`` advances in place.

    ``integer`` selects the integer variant where one exists: bernoulli yields
    0/1 and uniform yields an integer in ``[lo, hi]``.
    """
    problem = dist.problem()
    if problem:
        raise SimulationError(problem)
    k, p = dist.kind, dist.params
    if k == "uniform":
        if integer:
            return int(rng.integers(math.ceil(p[0]), math.floor(p[1]), endpoint=True))
        if p[0] == p[1]:
            return float(p[0])
        return float(rng.uniform(p[0], p[1]))
    if k == "exponential":
        return float(rng.exponential(1.0 / p[0]))
    if k == "normal":
        return float(rng.normal(p[0], p[1]))
    hit = bool(rng.random() < p[0])
    return int(hit) if integer else hit
