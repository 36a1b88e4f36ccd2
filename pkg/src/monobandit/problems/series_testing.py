"""Series-system testing: find a failed component at minimum expected cost.

Each component is Bernoulli on {0, 1} with 1 meaning *failed*.  Encoding
failure as the high value makes a dominating distribution the optimistic one:
components that fail more often end the search sooner, lowering cost.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate
from typing import Hashable, Sequence

from ..distributions import DiscreteDist
from ..policy import FeedbackMode, Policy, Probe, Sense, Stop
from .base import Direction, Problem, ProblemMeta, as_supports

BERNOULLI = (0.0, 1.0)


class SeriesOrderPolicy(Policy):
    """Test components in a fixed order until one fails.

    State is the number of components tested so far, tagged ``done`` after a
    failure.  The payoff is the summed cost of the tested components.
    """

    sense = Sense.MIN
    mode = FeedbackMode.SEMI_BANDIT

    def __init__(self, order: Sequence[int], costs: Sequence[float]):
        self.order = tuple(order)
        self.costs = tuple(costs)
        self.supports = (BERNOULLI,) * len(self.costs)
        self.f_max = float(sum(self.costs))
        self._prefix = (0.0,) + tuple(accumulate(self.costs[i] for i in self.order))

    @property
    def key(self) -> Hashable:
        return ("series", self.order)

    def initial_state(self) -> Hashable:
        return (0, False)

    def decide(self, state):
        pos, done = state
        if done or pos == len(self.order):
            return Stop(self._prefix[pos])
        return Probe(self.order[pos])

    def advance(self, state, probe, observation):
        pos, _ = state
        return (pos + 1, observation >= 1.0)


@dataclass
class SeriesTesting(Problem):
    """Components with testing costs ``costs``; items are failure indicators."""

    costs: tuple[float, ...]
    kind = "series_testing"

    def __post_init__(self):
        self.costs = tuple(float(c) for c in self.costs)
        if any(c <= 0 for c in self.costs):
            raise ValueError("testing costs must be positive")
        self.supports = as_supports([BERNOULLI] * len(self.costs))

    @property
    def meta(self) -> ProblemMeta:
        return ProblemMeta(Sense.MIN, Direction.UP, FeedbackMode.SEMI_BANDIT, sum(self.costs))

    def params(self) -> dict:
        return {"costs": list(self.costs)}

    def solve(self, dists: Sequence[DiscreteDist]) -> SeriesOrderPolicy:
        self.check_dists(dists)
        fail = [d.probs[1] for d in dists]
        return SeriesOrderPolicy(series_order(fail, self.costs), self.costs)

    def explore_policy(self, item: int, visit: int = 0) -> SeriesOrderPolicy:
        # test ``item`` first, then the rest by index; still a complete test
        order = [item] + [j for j in range(self.n) if j != item]
        return SeriesOrderPolicy(order, self.costs)


def series_order(fail_probs: Sequence[float], costs: Sequence[float]) -> list[int]:
    """Non-increasing failure-to-cost ratio, ties by ascending index."""
    return sorted(range(len(costs)), key=lambda i: (-fail_probs[i] / costs[i], i))


def series_cost(work_probs: Sequence[float], costs: Sequence[float], order: Sequence[int]) -> float:
    """Expected cost of testing in ``order`` given per-component working probabilities."""
    total, reach = 0.0, 1.0
    for i in order:
        total += reach * costs[i]
        reach *= work_probs[i]
    return total


def solve_series_testing(work_probs: Sequence[float], costs: Sequence[float]) -> SeriesOrderPolicy:
    """Optimal order from working probabilities (the usual parametrization)."""
    if any(not 0.0 <= p <= 1.0 for p in work_probs):
        raise ValueError("working probabilities must lie in [0, 1]")
    prob = SeriesTesting(tuple(costs))
    return prob.solve([DiscreteDist(BERNOULLI, (p, 1.0 - p)) for p in work_probs])
