"""Shared scaffolding for the problem definitions."""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from ..distributions import DiscreteDist
from ..policy import FeedbackMode, Policy, Sense


class Direction(str, Enum):
    UP = "up"
    DOWN = "down"


class Optimism(str, Enum):
    DOMINATING = "dominating"
    DOMINATED = "dominated"


@dataclass(frozen=True)
class ProblemMeta:
    objective: Sense
    direction: Direction
    feedback: FeedbackMode
    f_max: float

    @property
    def optimism(self) -> Optimism:
        up_min = self.direction is Direction.UP and self.objective is Sense.MIN
        down_max = self.direction is Direction.DOWN and self.objective is Sense.MAX
        return Optimism.DOMINATING if (up_min or down_max) else Optimism.DOMINATED


class Problem(ABC):
    """A monotone stochastic problem with declared per-item supports.

    ``solve`` must return an exactly optimal policy for the given product
    distribution; ``explore_policy`` returns the feasible policy used by the
    explore-then-commit baseline on its ``visit``-th exploration of ``item``.
    """

    kind: str = ""
    supports: tuple[tuple[float, ...], ...]

    @property
    def n(self) -> int:
        return len(self.supports)

    @property
    @abstractmethod
    def meta(self) -> ProblemMeta: ...

    @abstractmethod
    def solve(self, dists: Sequence[DiscreteDist]) -> Policy: ...

    @abstractmethod
    def explore_policy(self, item: int, visit: int = 0) -> Policy: ...

    @abstractmethod
    def params(self) -> dict: ...

    def check_dists(self, dists: Sequence[DiscreteDist]) -> None:
        if len(dists) != self.n:
            raise ValueError(f"expected {self.n} distributions, got {len(dists)}")
        for i, (d, s) in enumerate(zip(dists, self.supports)):
            if tuple(d.support) != s:
                raise ValueError(f"item {i}: support {d.support} differs from declared {s}")


def as_supports(supports: Sequence[Sequence[float]]) -> tuple[tuple[float, ...], ...]:
    out = tuple(tuple(float(v) for v in s) for s in supports)
    for i, s in enumerate(out):
        if not s:
            raise ValueError(f"item {i}: empty support")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ValueError(f"item {i}: support must be strictly increasing")
        if s[0] < 0:
            raise ValueError(f"item {i}: support must be non-negative")
    return out
