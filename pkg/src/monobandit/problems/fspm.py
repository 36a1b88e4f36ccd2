"""Fixed-order sequential posted pricing with at most kappa sales.

Buyer i accepts a posted price p iff X_i >= p, and the seller sees only that
bit.  The seller may also pass over a buyer; when a buyer's whole support lies
below what the remaining stock is worth, no support price can beat passing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from ..distributions import DiscreteDist
from ..policy import FeedbackMode, Policy, Probe, Sense, Stop
from .base import Direction, Problem, ProblemMeta, as_supports

SKIP = 0


def fspm_table(dists: Sequence[DiscreteDist], kappa: int) -> tuple[list[list[float]], list[list[int]]]:
    """V[i][r] and the chosen price level (1-based, SKIP for no offer)."""
    n = len(dists)
    value = [[0.0] * (kappa + 1) for _ in range(n + 1)]
    level = [[SKIP] * (kappa + 1) for _ in range(n)]
    for i in range(n - 1, -1, -1):
        d = dists[i]
        tails = d.tails()
        for r in range(1, kappa + 1):
            keep, sell = value[i + 1][r], value[i + 1][r - 1]
            best, arg = -float("inf"), SKIP
            for c, (price, q) in enumerate(zip(d.support, tails), start=1):
                v = q * (price + sell) + (1.0 - q) * keep
                if v > best:
                    best, arg = v, c
            if keep > best:
                best, arg = keep, SKIP
            value[i][r] = best
            level[i][r] = arg
    return value, level


class PostedPricePolicy(Policy):
    """Post ``levels[i][r]`` to buyer i with r units left; state (i, r, revenue)."""

    sense = Sense.MAX
    mode = FeedbackMode.BINARY

    def __init__(self, levels: Sequence[Sequence[int]], kappa: int, supports, tag: Hashable = "fspm"):
        self.levels = tuple(tuple(row) for row in levels)
        self.kappa = kappa
        self.supports = tuple(supports)
        self.f_max = kappa * max(s[-1] for s in self.supports)
        self._key = (tag, self.levels)

    @property
    def key(self) -> Hashable:
        return self._key

    def initial_state(self):
        return (0, self.kappa, 0.0)

    def decide(self, state):
        i, r, revenue = state
        while r > 0 and i < len(self.levels) and self.levels[i][r] == SKIP:
            i += 1
        if r == 0 or i == len(self.levels):
            return Stop(revenue)
        return Probe(i, self.levels[i][r])

    def advance(self, state, probe, observation):
        _, r, revenue = state
        i = probe.item
        if observation >= 1.0:
            return (i + 1, r - 1, revenue + self.supports[i][probe.level - 1])
        return (i + 1, r, revenue)


@dataclass
class Fspm(Problem):
    supports: tuple[tuple[float, ...], ...]
    kappa: int = 1
    kind = "fspm"

    def __post_init__(self):
        self.supports = as_supports(self.supports)
        self.kappa = int(self.kappa)
        if self.kappa < 1:
            raise ValueError("kappa must be at least 1")

    @property
    def meta(self) -> ProblemMeta:
        return ProblemMeta(Sense.MAX, Direction.DOWN, FeedbackMode.BINARY,
                           self.kappa * max(s[-1] for s in self.supports))

    def params(self) -> dict:
        return {"kappa": self.kappa}

    def solve(self, dists: Sequence[DiscreteDist]) -> PostedPricePolicy:
        self.check_dists(dists)
        _, levels = fspm_table(dists, self.kappa)
        return PostedPricePolicy(levels, self.kappa, self.supports)

    def explore_policy(self, item: int, visit: int = 0) -> PostedPricePolicy:
        # one buyer only; cycle over levels 2..k so every threshold gets trials
        k = len(self.supports[item])
        c = 1 if k == 1 else 2 + visit % (k - 1)
        levels = [[SKIP] * (self.kappa + 1) for _ in range(self.n)]
        levels[item] = [SKIP] + [c] * self.kappa
        return PostedPricePolicy(levels, self.kappa, self.supports, tag=("fspm-explore", item, c))


def solve_fspm(dists: Sequence[DiscreteDist], kappa: int = 1) -> PostedPricePolicy:
    return Fspm(tuple(d.support for d in dists), kappa).solve(dists)
