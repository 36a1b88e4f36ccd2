"""Pandora's box with Weitzman's reservation-value index.

Inspecting box i costs c_i and reveals X_i >= 0.  The payoff is the best
inspected value (0 if nothing was inspected) minus total inspection cost.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from itertools import accumulate
from typing import Hashable, Sequence

from ..distributions import DiscreteDist
from ..policy import FeedbackMode, Policy, Probe, Sense, Stop
from .base import Direction, Problem, ProblemMeta, as_supports


def reservation_value(d: DiscreteDist, c: float) -> float:
    """The r with E[(X - r)+] = c.

    E[(X - r)+] is piecewise linear and non-increasing in r, so we walk the
    support from the top and solve inside the bracketing interval.  Below a_1
    it equals mean - r, which handles c larger than E[X - a_1].
    """
    if c < 0:
        raise ValueError(f"cost must be non-negative, got {c!r}")
    xs, ps = d.support, d.probs
    k = len(xs)
    if c == 0:
        return xs[-1]
    # on [xs[j-1], xs[j]] the excess is sum_{i>=j} p_i (x_i - r)
    mass, weighted = 0.0, 0.0
    for j in range(k - 1, 0, -1):
        mass += ps[j]
        weighted += ps[j] * xs[j]
        if mass > 0 and weighted - mass * xs[j - 1] >= c:
            return (weighted - c) / mass
    mass += ps[0]
    weighted += ps[0] * xs[0]
    return (weighted - c) / mass


class WeitzmanPolicy(Policy):
    """Open boxes by decreasing reservation value; stop once the best prize beats the next index."""

    sense = Sense.MAX
    mode = FeedbackMode.SEMI_BANDIT

    def __init__(self, reservations: Sequence[float], costs: Sequence[float], supports):
        self.reservations = tuple(reservations)
        self.costs = tuple(costs)
        self.supports = tuple(supports)
        n = len(self.costs)
        self.order = tuple(sorted(range(n), key=lambda i: (-self.reservations[i], i)))
        self._prefix = (0.0,) + tuple(accumulate(self.costs[i] for i in self.order))
        top = max(s[-1] for s in self.supports) if self.supports else 0.0
        self.f_max = top + float(sum(self.costs))
        grid = sorted({0.0}.union(*self.supports))
        # behavior only depends on where each index falls among attainable prizes
        self._key = ("pandora", self.order, tuple(bisect.bisect_left(grid, r) for r in self.reservations))

    @property
    def key(self) -> Hashable:
        return self._key

    def initial_state(self) -> Hashable:
        return (0, 0.0)

    def decide(self, state):
        pos, best = state
        if pos == len(self.order) or best >= self.reservations[self.order[pos]]:
            return Stop(best - self._prefix[pos])
        return Probe(self.order[pos])

    def advance(self, state, probe, observation):
        pos, best = state
        return (pos + 1, max(best, observation))


class InspectOnePolicy(Policy):
    """Inspect a single box and keep whatever it holds."""

    sense = Sense.MAX
    mode = FeedbackMode.SEMI_BANDIT

    def __init__(self, item: int, costs: Sequence[float], supports):
        self.item = item
        self.costs = tuple(costs)
        self.supports = tuple(supports)
        self.f_max = max(s[-1] for s in self.supports) + float(sum(self.costs))

    @property
    def key(self) -> Hashable:
        return ("pandora-one", self.item)

    def initial_state(self):
        return None

    def decide(self, state):
        if state is None:
            return Probe(self.item)
        return Stop(state - self.costs[self.item])

    def advance(self, state, probe, observation):
        return max(observation, 0.0)


@dataclass
class Pandora(Problem):
    costs: tuple[float, ...]
    supports: tuple[tuple[float, ...], ...]
    kind = "pandora"

    def __post_init__(self):
        self.costs = tuple(float(c) for c in self.costs)
        self.supports = as_supports(self.supports)
        if len(self.costs) != len(self.supports):
            raise ValueError("one cost per box is required")
        if any(c < 0 for c in self.costs):
            raise ValueError("inspection costs must be non-negative")

    @property
    def meta(self) -> ProblemMeta:
        top = max(s[-1] for s in self.supports)
        return ProblemMeta(Sense.MAX, Direction.DOWN, FeedbackMode.SEMI_BANDIT, top + sum(self.costs))

    def params(self) -> dict:
        return {"costs": list(self.costs)}

    def solve(self, dists: Sequence[DiscreteDist]) -> WeitzmanPolicy:
        self.check_dists(dists)
        r = [reservation_value(d, c) for d, c in zip(dists, self.costs)]
        return WeitzmanPolicy(r, self.costs, self.supports)

    def explore_policy(self, item: int, visit: int = 0) -> InspectOnePolicy:
        return InspectOnePolicy(item, self.costs, self.supports)


def solve_pandora(dists: Sequence[DiscreteDist], costs: Sequence[float]) -> WeitzmanPolicy:
    return Pandora(tuple(costs), tuple(d.support for d in dists)).solve(dists)
