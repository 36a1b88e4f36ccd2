"""Single-resource revenue management with protection levels.

Item j is fare class j+1 with price ``prices[j]``; prices decrease with j and
classes arrive from the cheapest (item n-1) to the most expensive (item 0).
Offering q seats to a class sells min(q, X) of them and reveals only that
censored quantity, so a probe at threshold level q+1 (support value q).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from ..distributions import DiscreteDist
from ..policy import FeedbackMode, Policy, Probe, Sense, Stop
from .base import Direction, Problem, ProblemMeta, as_supports


def _continuation(d: DiscreteDist, price: float, offer: int, cap: int, nxt: Sequence[float]) -> float:
    """Revenue from offering ``offer`` of ``cap`` seats, then playing ``nxt``."""
    total = 0.0
    for x, p in zip(d.support, d.probs):
        if p:
            sold = min(offer, int(x))
            total += p * (price * sold + nxt[cap - sold])
    return total


@dataclass(frozen=True)
class SrmTables:
    """Value tables ``values[j][c]`` (classes j..0 remaining) and protection levels.

    The table of the first-arriving class is only filled when ``exhaustive`` is
    requested, since no protection level depends on it.

    ``protect[j]`` is the number of seats withheld from class j+1 for the
    dearer classes 1..j; ``protect[0]`` is 0.
    """

    values: tuple[tuple[float, ...], ...]
    protect: tuple[int, ...]
    exhaustive: tuple[tuple[float, ...], ...] | None = None

    def marginal(self, j: int) -> list[float]:
        v = self.values[j]
        return [float("inf")] + [v[y] - v[y - 1] for y in range(1, len(v))]


def srm_tables(
    dists: Sequence[DiscreteDist], prices: Sequence[float], capacity: int, *, exhaustive: bool = False
) -> SrmTables:
    """Protection-level DP; optionally also the DP maximizing over every offer size."""
    n = len(dists)
    caps = range(capacity + 1)
    values: list[tuple[float, ...]] = []
    full: list[tuple[float, ...]] = []
    protect = [0] * n
    zero = [0.0] * (capacity + 1)
    for j in range(n):
        prev = values[-1] if values else zero
        if j > 0:
            dv = [float("inf")] + [prev[y] - prev[y - 1] for y in range(1, capacity + 1)]
            protect[j] = max(y for y in caps if dv[y] > prices[j])
        y = protect[j]
        if j < n - 1 or exhaustive:
            values.append(tuple(
                _continuation(dists[j], prices[j], c - min(y, c), c, prev) for c in caps
            ))
        if exhaustive:
            prev_full = full[-1] if full else zero
            full.append(tuple(
                max(_continuation(dists[j], prices[j], q, c, prev_full) for q in range(c + 1)) for c in caps
            ))
    return SrmTables(tuple(values), tuple(protect), tuple(full) if exhaustive else None)


class ProtectionPolicy(Policy):
    """Offer each arriving class everything above its protection level.

    State is (items still to arrive, seats left, revenue so far).  A class
    offered zero seats is skipped without a probe.
    """

    sense = Sense.MAX
    mode = FeedbackMode.CENSORED

    def __init__(self, protect: Sequence[int], prices: Sequence[float], capacity: int, supports,
                 *, offers: Sequence[int] | None = None):
        self.protect = tuple(protect)
        self.prices = tuple(prices)
        self.capacity = capacity
        self.supports = tuple(supports)
        self.f_max = self.prices[0] * capacity
        # fixed offers (seat counts per class, capped by what is left) override protection
        self.offers = None if offers is None else tuple(offers)
        self._key = ("srm", self.protect) if offers is None else ("srm-fixed", self.offers)

    @property
    def key(self) -> Hashable:
        return self._key

    def initial_state(self):
        return (len(self.prices), self.capacity, 0.0)

    def _offer(self, j: int, cap: int) -> int:
        if self.offers is not None:
            return min(self.offers[j], cap)
        return cap - min(self.protect[j], cap)

    def decide(self, state):
        left, cap, revenue = state
        j = left - 1
        while j >= 0 and self._offer(j, cap) == 0:
            j -= 1
        if j < 0:
            return Stop(revenue)
        return Probe(j, self._offer(j, cap) + 1)

    def advance(self, state, probe, observation):
        _, cap, revenue = state
        sold = int(round(observation))
        return (probe.item, cap - sold, revenue + self.prices[probe.item] * sold)


@dataclass
class Srm(Problem):
    prices: tuple[float, ...]
    capacity: int
    kind = "srm"

    def __post_init__(self):
        self.prices = tuple(float(p) for p in self.prices)
        self.capacity = int(self.capacity)
        if self.capacity < 1:
            raise ValueError("capacity must be at least 1")
        if any(b >= a for a, b in zip(self.prices, self.prices[1:])):
            raise ValueError("prices must strictly decrease from class 1 to class n")
        if any(p <= 0 for p in self.prices):
            raise ValueError("prices must be positive")
        self.supports = as_supports([range(self.capacity + 1)] * len(self.prices))

    @property
    def meta(self) -> ProblemMeta:
        return ProblemMeta(Sense.MAX, Direction.DOWN, FeedbackMode.CENSORED, self.prices[0] * self.capacity)

    def params(self) -> dict:
        return {"prices": list(self.prices), "capacity": self.capacity}

    def check_dists(self, dists):
        for i, d in enumerate(dists):
            if d.hi > self.capacity:
                raise ValueError(f"class {i + 1}: demand support exceeds capacity {self.capacity}")
        super().check_dists(dists)

    def tables(self, dists: Sequence[DiscreteDist], exhaustive: bool = False) -> SrmTables:
        self.check_dists(dists)
        return srm_tables(dists, self.prices, self.capacity, exhaustive=exhaustive)

    def solve(self, dists: Sequence[DiscreteDist]) -> ProtectionPolicy:
        tables = self.tables(dists)
        return ProtectionPolicy(tables.protect, self.prices, self.capacity, self.supports)

    def explore_policy(self, item: int, visit: int = 0) -> ProtectionPolicy:
        offers = [self.capacity if j <= item else 0 for j in range(self.n)]
        return ProtectionPolicy([0] * self.n, self.prices, self.capacity, self.supports, offers=offers)


def solve_srm(dists: Sequence[DiscreteDist], prices: Sequence[float], capacity: int) -> ProtectionPolicy:
    return Srm(tuple(prices), capacity).solve(dists)
