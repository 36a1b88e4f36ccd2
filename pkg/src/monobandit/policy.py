"""Implicit decision-tree policies: execution, exact evaluation, probe probabilities.

A policy is a deterministic state machine.  ``decide`` maps an information
state to either a probe or a stop; ``advance`` folds the observation of a probe
into the next state.  Observations depend on the feedback mode: the raw value
(semi-bandit), ``min(x, a_c)`` (censored) or ``I[x >= a_c]`` (binary), where
``a_c`` is the probe's threshold level in the item's declared support.
"""
from __future__ import annotations

import math
import os
from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Sequence

import numpy as np

from .distributions import DiscreteDist, TrueDistSpec, sample_many

DEFAULT_STATE_BUDGET = 1_000_000


class FeedbackMode(str, Enum):
    SEMI_BANDIT = "semi-bandit"
    CENSORED = "censored"
    BINARY = "binary"


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class PolicyError(RuntimeError):
    """A policy violated its contract (re-probe, non-termination); a solver bug."""


class StateBudgetExceeded(RuntimeError):
    """Too many reachable states for exact evaluation."""


def state_budget() -> int:
    raw = os.environ.get("MB_STATE_BUDGET")
    return int(raw) if raw else DEFAULT_STATE_BUDGET


@dataclass(frozen=True)
class Probe:
    """Probe ``item``; ``level`` is the 1-based threshold level for censored/binary probes."""

    item: int
    level: int | None = None


@dataclass(frozen=True)
class Stop:
    payoff: float


class Policy(ABC):
    """Base class for the implicit policies emitted by the solvers.

    Subclasses set ``mode``, ``sense``, ``f_max`` and ``supports`` (declared
    per-item support) and provide ``key``: two policies with equal keys act
    identically on every realization within the declared supports.
    """

    mode: FeedbackMode = FeedbackMode.SEMI_BANDIT
    sense: Sense = Sense.MAX
    f_max: float = 1.0
    supports: tuple[tuple[float, ...], ...] = ()

    @property
    def n(self) -> int:
        return len(self.supports)

    @property
    @abstractmethod
    def key(self) -> Hashable: ...

    @abstractmethod
    def initial_state(self) -> Hashable: ...

    @abstractmethod
    def decide(self, state: Hashable) -> Probe | Stop: ...

    @abstractmethod
    def advance(self, state: Hashable, probe: Probe, observation: float) -> Hashable: ...

    def threshold(self, probe: Probe) -> float | None:
        if probe.level is None:
            return None
        return self.supports[probe.item][probe.level - 1]


class StopPolicy(Policy):
    """Stops immediately with a fixed payoff."""

    def __init__(self, payoff: float, supports: Sequence[Sequence[float]] = (), sense: Sense = Sense.MAX):
        self.payoff = float(payoff)
        self.supports = tuple(tuple(s) for s in supports)
        self.sense = sense
        self.f_max = abs(self.payoff)

    @property
    def key(self) -> Hashable:
        return ("stop", self.payoff)

    def initial_state(self) -> Hashable:
        return ()

    def decide(self, state: Hashable) -> Probe | Stop:
        return Stop(self.payoff)

    def advance(self, state, probe, observation):  # pragma: no cover - never probes
        raise PolicyError("stop policy never probes")


def observe(value: float, threshold: float | None, mode: FeedbackMode) -> float:
    if threshold is None or mode is FeedbackMode.SEMI_BANDIT:
        return value
    if mode is FeedbackMode.CENSORED:
        return min(value, threshold)
    return 1.0 if value >= threshold else 0.0


@dataclass(frozen=True)
class ExecutionTrace:
    """Probed ``(item, level, observation)`` triples and the terminal payoff."""

    probed: tuple[tuple[int, int | None, float], ...]
    payoff: float

    @property
    def items(self) -> tuple[int, ...]:
        return tuple(i for i, _, _ in self.probed)

    @property
    def feedback(self) -> tuple[float, ...]:
        return tuple(obs for _, _, obs in self.probed)


def execute(policy: Policy, realization: Sequence[float], mode: FeedbackMode | None = None) -> ExecutionTrace:
    """Run ``policy`` on one realization, exposing only mode-appropriate feedback."""
    mode = policy.mode if mode is None else FeedbackMode(mode)
    state = policy.initial_state()
    seen: set[int] = set()
    probed = []
    for _ in range(len(realization) + 1):
        action = policy.decide(state)
        if isinstance(action, Stop):
            return ExecutionTrace(tuple(probed), action.payoff)
        if action.item in seen:
            raise PolicyError(f"item {action.item} probed twice")
        seen.add(action.item)
        obs = observe(realization[action.item], policy.threshold(action), mode)
        probed.append((action.item, action.level, obs))
        state = policy.advance(state, action, obs)
    raise PolicyError("policy did not stop after probing every item")


def outcomes(d: DiscreteDist, threshold: float | None, mode: FeedbackMode) -> list[tuple[float, float]]:
    """(observation, probability) pairs of one probe under ``d``."""
    if threshold is None or mode is FeedbackMode.SEMI_BANDIT:
        return [(v, p) for v, p in zip(d.support, d.probs) if p > 0.0]
    acc: dict[float, float] = defaultdict(float)
    for v, p in zip(d.support, d.probs):
        if p > 0.0:
            acc[observe(v, threshold, mode)] += p
    return sorted(acc.items())


@dataclass(frozen=True)
class ProbeProbabilities:
    """Q_i per item and Q_{c,i} per (item, level); level is None for semi-bandit probes."""

    by_item: dict[int, float]
    by_level: dict[tuple[int, int | None], float]

    def item(self, i: int) -> float:
        return self.by_item.get(i, 0.0)

    def level(self, i: int, c: int | None) -> float:
        return self.by_level.get((i, c), 0.0)


def _traverse(policy: Policy, dist: Sequence[DiscreteDist], budget: int | None):
    """Forward pass over reachable states, merging equal states within a depth."""
    budget = state_budget() if budget is None else budget
    mode = policy.mode
    n = len(dist)
    cache: dict[tuple[int, int | None], list[tuple[float, float]]] = {}
    layer: dict[Hashable, float] = {policy.initial_state(): 1.0}
    value_terms: list[float] = []
    q: dict[tuple[int, int | None], float] = defaultdict(float)
    visited = 0
    for depth in range(n + 1):
        visited += len(layer)
        if visited > budget:
            raise StateBudgetExceeded(f"more than {budget} states; too large for exact evaluation")
        nxt: dict[Hashable, float] = defaultdict(float)
        for state, pr in layer.items():
            action = policy.decide(state)
            if isinstance(action, Stop):
                value_terms.append(pr * action.payoff)
                continue
            if depth == n:
                raise PolicyError("policy probes more than n items")
            key = (action.item, action.level)
            q[key] += pr
            branches = cache.get(key)
            if branches is None:
                branches = outcomes(dist[action.item], policy.threshold(action), mode)
                cache[key] = branches
            for obs, po in branches:
                nxt[policy.advance(state, action, obs)] += pr * po
        if not nxt:
            break
        layer = nxt
    return math.fsum(value_terms), q


def exact_value(policy: Policy, dist: Sequence[DiscreteDist], budget: int | None = None) -> float:
    """Expected payoff of ``policy`` when items are drawn from ``dist``."""
    return _traverse(policy, dist, budget)[0]


def probe_probabilities(
    policy: Policy, dist: Sequence[DiscreteDist], budget: int | None = None
) -> ProbeProbabilities:
    _, q = _traverse(policy, dist, budget)
    by_item: dict[int, float] = defaultdict(float)
    for (i, _), p in q.items():
        by_item[i] += p
    return ProbeProbabilities(dict(by_item), dict(q))


def value_and_probes(
    policy: Policy, dist: Sequence[DiscreteDist], budget: int | None = None
) -> tuple[float, ProbeProbabilities]:
    value, q = _traverse(policy, dist, budget)
    by_item: dict[int, float] = defaultdict(float)
    for (i, _), p in q.items():
        by_item[i] += p
    return value, ProbeProbabilities(dict(by_item), dict(q))


def monte_carlo_value(
    policy: Policy, true_specs: Sequence[TrueDistSpec], n_samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Sample mean and standard error of the payoff over i.i.d. realizations."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    draws = np.column_stack([sample_many(s, rng, n_samples) for s in true_specs])
    payoffs = np.array([execute(policy, row).payoff for row in draws.tolist()])
    mean = float(payoffs.mean())
    if n_samples == 1:
        return mean, 0.0
    return mean, float(payoffs.std(ddof=1) / math.sqrt(n_samples))
