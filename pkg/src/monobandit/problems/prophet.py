"""Prophet inequality with a fixed arrival order: the optimal stopping rule."""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Hashable, Sequence

from ..distributions import DiscreteDist
from ..policy import FeedbackMode, Policy, Probe, Sense, Stop
from .base import Direction, Problem, ProblemMeta, as_supports


def prophet_thresholds(dists: Sequence[DiscreteDist]) -> tuple[list[float], float]:
    """Backward induction: tau_i is the value of continuing past item i."""
    n = len(dists)
    taus = [0.0] * n
    cont = 0.0
    for i in range(n - 1, -1, -1):
        taus[i] = cont
        d = dists[i]
        cont = sum(p * max(v, cont) for v, p in zip(d.support, d.probs))
    return taus, cont


class ThresholdPolicy(Policy):
    """Observe items in order; accept the first x_i strictly above tau_i."""

    sense = Sense.MAX
    mode = FeedbackMode.SEMI_BANDIT

    def __init__(self, thresholds: Sequence[float], supports, *, accept_at: int | None = None):
        self.thresholds = tuple(thresholds)
        self.supports = tuple(supports)
        self.f_max = max(s[-1] for s in self.supports)
        self.accept_at = accept_at
        if accept_at is None:
            self._key = ("prophet", tuple(bisect.bisect_right(s, t) for s, t in zip(self.supports, self.thresholds)))
        else:
            self._key = ("prophet-explore", accept_at)

    @property
    def key(self) -> Hashable:
        return self._key

    def initial_state(self):
        return (0, None)

    def decide(self, state):
        i, taken = state
        if taken is not None:
            return Stop(taken)
        if i == len(self.supports):
            return Stop(0.0)
        return Probe(i)

    def advance(self, state, probe, observation):
        i, _ = state
        if self.accept_at is not None:
            accept = i == self.accept_at
        else:
            accept = observation > self.thresholds[i]
        return (i + 1, observation if accept else None)


@dataclass
class Prophet(Problem):
    supports: tuple[tuple[float, ...], ...]
    kind = "prophet"

    def __post_init__(self):
        self.supports = as_supports(self.supports)

    @property
    def meta(self) -> ProblemMeta:
        return ProblemMeta(Sense.MAX, Direction.DOWN, FeedbackMode.SEMI_BANDIT, max(s[-1] for s in self.supports))

    def params(self) -> dict:
        return {}

    def solve(self, dists: Sequence[DiscreteDist]) -> ThresholdPolicy:
        self.check_dists(dists)
        taus, _ = prophet_thresholds(dists)
        return ThresholdPolicy(taus, self.supports)

    def explore_policy(self, item: int, visit: int = 0) -> ThresholdPolicy:
        # pass over earlier items (observing them) and take ``item`` whatever it is
        return ThresholdPolicy([0.0] * self.n, self.supports, accept_at=item)


def solve_prophet(dists: Sequence[DiscreteDist]) -> ThresholdPolicy:
    return Prophet(tuple(d.support for d in dists)).solve(dists)
