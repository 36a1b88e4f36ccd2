"""Brute-force ground truth by exhaustive search over information states.

Nothing here reuses solver logic.  Each problem gets a memoized recursion over
what the decision maker knows, taking the best legal action at every state.
It is meant to be obviously correct on tiny instances, not fast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from .distributions import DiscreteDist, binary_compress, dominates, truncate, tv_distance
from .policy import FeedbackMode, Policy, Sense, StateBudgetExceeded, exact_value, probe_probabilities
from .problems import Fspm, Pandora, Problem, Prophet, SeriesTesting, Srm
from .problems.base import Optimism

SLACK = 1e-9
DEFAULT_CAP = 1_000_000


@dataclass
class OracleResult:
    """Optimum, the best action at every visited state, and how many states were visited."""

    optimum: float
    policy: dict[Hashable, Hashable] = field(repr=False)
    state_count: int


class _Memo:
    def __init__(self, cap: int):
        self.cap = cap
        self.values: dict[Hashable, float] = {}
        self.actions: dict[Hashable, Hashable] = {}

    def get(self, state: Hashable, compute: Callable[[], tuple[float, Hashable]]) -> float:
        if state in self.values:
            return self.values[state]
        if len(self.values) >= self.cap:
            raise StateBudgetExceeded(f"oracle state cap {self.cap} exceeded")
        value, action = compute()
        self.values[state] = value
        self.actions[state] = action
        return value

    def result(self, optimum: float) -> OracleResult:
        return OracleResult(optimum, self.actions, len(self.values))


def _outcomes(d: DiscreteDist) -> list[tuple[float, float]]:
    return [(v, p) for v, p in zip(d.support, d.probs) if p > 0]


def _series(prob: SeriesTesting, dist: Sequence[DiscreteDist], memo: _Memo) -> float:
    n = prob.n
    fail = [d.prob_of(1.0) for d in dist]

    def value(tested: frozenset) -> float:
        # every component tested so far worked; expected cost still to pay
        def compute():
            if len(tested) == n:
                return 0.0, "stop"
            best, arg = math.inf, None
            for i in range(n):
                if i in tested:
                    continue
                v = prob.costs[i] + (1.0 - fail[i]) * value(tested | {i})
                if v < best - SLACK:
                    best, arg = v, i
            return best, arg

        return memo.get(tested, compute)

    return value(frozenset())


def _pandora(prob: Pandora, dist: Sequence[DiscreteDist], memo: _Memo) -> float:
    n = prob.n

    def value(opened: frozenset, best: float) -> float:
        # expected final prize minus costs still to pay
        def compute():
            top, arg = best, "stop"
            for i in range(n):
                if i in opened:
                    continue
                v = -prob.costs[i] + sum(p * value(opened | {i}, max(best, x)) for x, p in _outcomes(dist[i]))
                if v > top + SLACK:
                    top, arg = v, i
            return top, arg

        return memo.get((opened, best), compute)

    return value(frozenset(), 0.0)


def _prophet(prob: Prophet, dist: Sequence[DiscreteDist], memo: _Memo) -> float:
    n = prob.n

    def value(i: int) -> float:
        def compute():
            if i == n:
                return 0.0, "stop"
            rest = value(i + 1)
            total = 0.0
            for x, p in _outcomes(dist[i]):
                memo.actions[(i, x)] = "accept" if x > rest else "reject"
                total += p * max(x, rest)
            return total, "observe"

        return memo.get(i, compute)

    return value(0)


def _srm(prob: Srm, dist: Sequence[DiscreteDist], memo: _Memo) -> float:
    def value(j: int, cap: int) -> float:
        # classes j, j-1, ..., 0 still to arrive
        def compute():
            if j < 0 or cap == 0:
                return 0.0, "stop"
            best, arg = -math.inf, None
            for q in range(cap + 1):
                v = 0.0
                for x, p in _outcomes(dist[j]):
                    sold = min(q, int(x))
                    v += p * (prob.prices[j] * sold + value(j - 1, cap - sold))
                if v > best + SLACK:
                    best, arg = v, q
            return best, arg

        return memo.get((j, cap), compute)

    return value(prob.n - 1, prob.capacity)


def _fspm(prob: Fspm, dist: Sequence[DiscreteDist], memo: _Memo) -> float:
    n = prob.n
    # any price is dominated by the smallest attainable value at or above it
    grid = sorted(set().union(*prob.supports))

    def value(i: int, r: int) -> float:
        def compute():
            if i == n or r == 0:
                return 0.0, "stop"
            best, arg = value(i + 1, r), "skip"
            for price in grid:
                q = dist[i].tail(price)
                v = q * (price + value(i + 1, r - 1)) + (1.0 - q) * value(i + 1, r)
                if v > best + SLACK:
                    best, arg = v, price
            return best, arg

        return memo.get((i, r), compute)

    return value(0, prob.kappa)


_SEARCHERS = {
    "series_testing": _series,
    "pandora": _pandora,
    "prophet": _prophet,
    "srm": _srm,
    "fspm": _fspm,
}


def brute_force_opt(problem: Problem, dist: Sequence[DiscreteDist], cap: int = DEFAULT_CAP) -> OracleResult:
    """Exact optimum of ``problem`` under ``dist`` by exhaustive state search.

    Raises:
        StateBudgetExceeded: more than ``cap`` information states.
    """
    problem.check_dists(dist)
    memo = _Memo(cap)
    optimum = _SEARCHERS[problem.kind](problem, dist, memo)
    return memo.result(optimum)


def check_monotonicity(problem: Problem, d: Sequence[DiscreteDist], e: Sequence[DiscreteDist]) -> bool:
    """Whether OPT moves in the declared direction when every e_i dominates d_i."""
    if not all(dominates(ei, di) for ei, di in zip(e, d)):
        raise ValueError("each e_i must stochastically dominate d_i")
    opt_d = brute_force_opt(problem, d).optimum
    opt_e = brute_force_opt(problem, e).optimum
    # up-monotone problems get cheaper, down-monotone ones more valuable
    if problem.meta.objective is Sense.MIN:
        return opt_e <= opt_d + SLACK
    return opt_e >= opt_d - SLACK


def level_distances(d: DiscreteDist, e: DiscreteDist, mode: FeedbackMode) -> dict[int | None, float]:
    """TV per probe level: whole distributions, truncations, or compressions."""
    if mode is FeedbackMode.SEMI_BANDIT:
        return {None: tv_distance(d, e)}
    squash = truncate if mode is FeedbackMode.CENSORED else binary_compress
    return {c: tv_distance(squash(d, c), squash(e, c)) for c in range(1, d.k + 1)}


@dataclass(frozen=True)
class StabilityCheck:
    gap: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.gap <= self.bound + SLACK


def stability_terms(
    problem: Problem, d: Sequence[DiscreteDist], e: Sequence[DiscreteDist], alpha: float, policy_from_e: Policy
) -> StabilityCheck:
    """Directed regret gap of ``policy_from_e`` under ``d`` and its f_max * sum Q * eps bound."""
    meta = problem.meta
    if meta.optimism is Optimism.DOMINATING:
        ok = all(dominates(ei, di) for ei, di in zip(e, d))
    else:
        ok = all(dominates(di, ei) for ei, di in zip(e, d))
    if not ok:
        raise ValueError(f"stability needs {meta.optimism.value} estimates")
    opt = brute_force_opt(problem, d).optimum
    value = exact_value(policy_from_e, d)
    gap = value - alpha * opt if meta.objective is Sense.MIN else alpha * opt - value
    q = probe_probabilities(policy_from_e, d)
    eps = [level_distances(di, ei, meta.feedback) for di, ei in zip(d, e)]
    terms = [p * eps[i][level] for (i, level), p in q.by_level.items()]
    return StabilityCheck(gap, meta.f_max * math.fsum(terms))


def check_stability(
    problem: Problem, d: Sequence[DiscreteDist], e: Sequence[DiscreteDist], alpha: float, policy_from_e: Policy
) -> bool:
    return stability_terms(problem, d, e, alpha, policy_from_e).ok
