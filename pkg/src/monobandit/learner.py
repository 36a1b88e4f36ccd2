"""Online loops: optimistic re-solving, explore-then-commit, and the clairvoyant floor.

Every loop draws the realization x^t from per-item counter-based streams, so
all algorithms run on the same sequence for a given seed (common random
numbers), and records exact expected regret whenever the truth is discrete.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .distributions import (
    DiscreteDist,
    DiscreteSpec,
    TrueDistSpec,
    dominates,
    is_discrete,
    item_stream,
    sample_many,
    snap_index,
)
from .oracle import level_distances
from .policy import (
    FeedbackMode,
    Policy,
    Sense,
    execute,
    exact_value,
    value_and_probes,
)
from .problems import Problem, with_supports
from .problems.base import Optimism
from .sampling import (
    censored_dominating_counts,
    emp_stoc_dom_counts,
    emp_stoc_dom_cts,
    emp_stoc_dom_down_counts,
    transfer_up,
)

MC_STREAM = 1_000_000
DISCRETIZATION = 512


def default_delta(mode: FeedbackMode, n: int, k: int, horizon: int) -> float:
    """2/(nT)^3 for semi-bandit feedback, 2/(knT)^3 for censored and binary."""
    if mode is FeedbackMode.SEMI_BANDIT:
        return 2.0 / (n * horizon) ** 3
    return 2.0 / (k * n * horizon) ** 3


class SampleStore:
    """Running sample statistics per item, in the form each estimator needs.

    ``count(i)`` is N_i, the number of probes of item i; ``level_count(i, c)``
    is the number of probes of item i at threshold level c.
    """

    def __init__(self, supports: Sequence[Sequence[float]], mode: FeedbackMode, keep_raw: bool = False):
        self.supports = tuple(tuple(s) for s in supports)
        self.mode = FeedbackMode(mode)
        n = len(self.supports)
        self.keep_raw = keep_raw
        self.raw: list[list[float]] = [[] for _ in range(n)]
        self.n_probes = [0] * n
        self.level_probes: list[dict[int | None, int]] = [{} for _ in range(n)]
        k = [len(s) for s in self.supports]
        # semi-bandit: counts per support value
        self.value_counts = [[0] * k[i] for i in range(n)]
        # censored: samples informative about each level, and hits at or above it
        self.effective = [[0] * k[i] for i in range(n)]
        self.top_hits = [[0] * k[i] for i in range(n)]
        # binary: successes and trials per level
        self.successes = [[0] * k[i] for i in range(n)]
        self.trials = [[0] * k[i] for i in range(n)]

    def count(self, i: int) -> int:
        return self.n_probes[i]

    def level_count(self, i: int, c: int | None) -> int:
        return self.level_probes[i].get(c, 0)

    def record(self, item: int, level: int | None, observation: float) -> None:
        self.n_probes[item] += 1
        self.level_probes[item][level] = self.level_probes[item].get(level, 0) + 1
        if self.keep_raw:
            self.raw[item].append(observation)
            return
        support = self.supports[item]
        if self.mode is FeedbackMode.SEMI_BANDIT:
            self.value_counts[item][snap_index(support, observation)] += 1
            return
        if level is None:
            raise ValueError(f"{self.mode.value} feedback needs a threshold level")
        if self.mode is FeedbackMode.CENSORED:
            j = snap_index(support, observation)
            if j > level - 1:
                raise ValueError(f"censored observation {observation!r} above level {level}")
            eff, hits = self.effective[item], self.top_hits[item]
            for b in range(level):
                eff[b] += 1
                if j >= b:
                    hits[b] += 1
        else:
            self.trials[item][level - 1] += 1
            if observation >= 1.0:
                self.successes[item][level - 1] += 1

    def level_estimates(self, i: int) -> tuple[list[float], list[int]]:
        """Per-level estimates of Pr[X >= a_c] and the sample count behind each."""
        if self.mode is FeedbackMode.CENSORED:
            counts = self.effective[i]
            hits = self.top_hits[i]
        else:
            counts = self.trials[i]
            hits = self.successes[i]
        return [h / m if m else 0.0 for h, m in zip(hits, counts)], list(counts)


def optimistic_estimate(store: SampleStore, i: int, delta: float, optimism: Optimism) -> DiscreteDist:
    """The confidence-adjusted estimate for item ``i`` matching the feedback mode."""
    support = store.supports[i]
    if store.mode is FeedbackMode.SEMI_BANDIT:
        if optimism is Optimism.DOMINATING:
            return emp_stoc_dom_counts(support, store.value_counts[i], delta)
        return emp_stoc_dom_down_counts(support, store.value_counts[i], delta)
    if optimism is not Optimism.DOMINATING:
        raise ValueError("censored and binary feedback only support dominating estimates")
    if store.mode is FeedbackMode.CENSORED:
        return censored_dominating_counts(support, store.effective[i], store.top_hits[i], delta)
    p_hat, counts = store.level_estimates(i)
    k = len(support)
    half_log = math.log(2.0 * k / delta) / 2.0
    widths = [min(1.0, math.sqrt(half_log / m)) if m > 0 else 1.0 for m in counts]
    return DiscreteDist(support, tuple(transfer_up(p_hat, widths)))


def empirical_estimate(store: SampleStore, i: int, optimism: Optimism) -> DiscreteDist:
    """Plain (zero-width) estimate; unobserved parts fall back to the optimistic prior."""
    support = store.supports[i]
    if store.mode is FeedbackMode.SEMI_BANDIT:
        counts = store.value_counts[i]
        m = sum(counts)
        if m == 0:
            top = support[-1] if optimism is Optimism.DOMINATING else support[0]
            return DiscreteDist.point_mass(top, support)
        return DiscreteDist(support, tuple(c / m for c in counts))
    p_hat, counts = store.level_estimates(i)
    tails = [p if m else 1.0 for p, m in zip(p_hat, counts)]
    return DiscreteDist(support, tuple(transfer_up(tails, [0.0] * len(tails))))


@dataclass(frozen=True)
class LearnerConfig:
    """Knobs shared by every loop.

    Attributes:
        delta: failure probability per estimate; None selects the default schedule.
        alpha: approximation factor of the solver (1 for the shipped exact solvers).
        debug: assert the per-round stability bound whenever estimates dominate the truth.
        mc_samples: realizations used when expected values cannot be computed exactly.
        state_budget: cap on reachable states for exact evaluation.
    """

    delta: float | None = None
    alpha: float = 1.0
    debug: bool = False
    mc_samples: int = 4000
    state_budget: int | None = None


@dataclass(frozen=True)
class RoundRecord:
    t: int
    policy_key: Hashable = field(repr=False)
    expected_payoff: float
    exact: bool
    realized_payoff: float
    probed: tuple[int, ...]
    regret_increment: float
    realized_regret_increment: float


class _Evaluator:
    """Expected payoffs under the truth: exact when discrete, common-sample Monte Carlo otherwise."""

    def __init__(self, problem: Problem, true_specs: Sequence[TrueDistSpec], seed: int, run: int, cfg: LearnerConfig):
        self.problem = problem
        self.cfg = cfg
        self.exact = all(is_discrete(s) for s in true_specs)
        self.cache: dict[Hashable, float] = {}
        if self.exact:
            self.truth = [s.dist for s in true_specs]
            self.optimal = problem.solve(self.truth)
        else:
            rng = item_stream(seed, MC_STREAM, run)
            self.rows = np.column_stack(
                [sample_many(s, rng, cfg.mc_samples) for s in true_specs]
            ).tolist()
            grid_problem, grid = discretize(problem, true_specs)
            self.optimal = grid_problem.solve(grid)
        self.opt = self.value(self.optimal)

    def value(self, policy: Policy) -> float:
        key = policy.key
        hit = self.cache.get(key)
        if hit is None:
            if self.exact:
                hit = exact_value(policy, self.truth, self.cfg.state_budget)
            else:
                hit = math.fsum(execute(policy, row).payoff for row in self.rows) / len(self.rows)
            self.cache[key] = hit
        return hit


def discretize(problem: Problem, true_specs: Sequence[TrueDistSpec]) -> tuple[Problem, list[DiscreteDist]]:
    """Quantile discretization of continuous truths, used only to pick the benchmark policy."""
    dists = []
    for s in true_specs:
        if is_discrete(s):
            dists.append(s.dist)
            continue
        u = (np.arange(DISCRETIZATION) + 0.5) / DISCRETIZATION
        vals, counts = np.unique(s.ppf(u), return_counts=True)
        dists.append(DiscreteDist(tuple(vals.tolist()), tuple((counts / counts.sum()).tolist())))
    return with_supports(problem, [d.support for d in dists]), dists


def _draws(true_specs: Sequence[TrueDistSpec], horizon: int, seed: int, run: int) -> list[list[float]]:
    cols = [sample_many(s, item_stream(seed, i, run), horizon) for i, s in enumerate(true_specs)]
    return np.column_stack(cols).tolist()


def _sign(sense: Sense) -> float:
    return -1.0 if sense is Sense.MIN else 1.0


class _Loop:
    """State shared by the three loops for one (seed, horizon) run."""

    def __init__(self, problem, true_specs, horizon, seed, run, cfg):
        if horizon < 1:
            raise ValueError("horizon must be positive")
        if len(true_specs) != problem.n:
            raise ValueError(f"expected {problem.n} true distributions, got {len(true_specs)}")
        self.problem = problem
        self.meta = problem.meta
        self.cfg = cfg
        self.horizon = horizon
        self.evaluator = _Evaluator(problem, true_specs, seed, run, cfg)
        self.draws = _draws(true_specs, horizon, seed, run)
        self.sign = _sign(self.meta.objective)
        self.continuous = not self.evaluator.exact
        if self.continuous and self.meta.feedback is not FeedbackMode.SEMI_BANDIT:
            raise ValueError("continuous distributions need semi-bandit feedback")
        self.store = SampleStore(problem.supports, self.meta.feedback, keep_raw=self.continuous)
        self.bounds = [(s.lower, s.upper) for s in true_specs]
        k = max(len(s) for s in problem.supports)
        self.delta = cfg.delta if cfg.delta is not None else default_delta(self.meta.feedback, problem.n, k, horizon)

    def play(self, t: int, policy: Policy) -> RoundRecord:
        x = self.draws[t - 1]
        trace = execute(policy, x, self.meta.feedback)
        for item, level, obs in trace.probed:
            self.store.record(item, level, obs)
        star = execute(self.evaluator.optimal, x, self.meta.feedback).payoff
        value = self.evaluator.value(policy)
        alpha = self.cfg.alpha
        return RoundRecord(
            t=t,
            policy_key=policy.key,
            expected_payoff=value,
            exact=self.evaluator.exact,
            realized_payoff=trace.payoff,
            probed=trace.items,
            regret_increment=self.sign * (alpha * self.evaluator.opt - value),
            realized_regret_increment=self.sign * (alpha * star - trace.payoff),
        )

    def solve_continuous(self, optimistic: bool) -> Policy:
        dists = []
        for i, (lo, hi) in enumerate(self.bounds):
            raw = self.store.raw[i]
            if not raw:
                dists.append(DiscreteDist.point_mass(hi))
            elif optimistic:
                dists.append(emp_stoc_dom_cts(raw, (lo, hi), self.delta).to_discrete())
            else:
                vals, counts = np.unique(np.asarray(raw), return_counts=True)
                dists.append(DiscreteDist(tuple(vals.tolist()), tuple((counts / counts.sum()).tolist())))
        return with_supports(self.problem, [d.support for d in dists]).solve(dists)

    def check_stability(self, policy: Policy, estimates: Sequence[DiscreteDist], record: RoundRecord) -> None:
        truth = self.evaluator.truth
        if self.meta.optimism is Optimism.DOMINATING:
            holds = all(dominates(e, d) for e, d in zip(estimates, truth))
        else:
            holds = all(dominates(d, e) for e, d in zip(estimates, truth))
        if not holds:
            return
        _, q = value_and_probes(policy, truth, self.cfg.state_budget)
        eps = [level_distances(d, e, self.meta.feedback) for d, e in zip(truth, estimates)]
        bound = self.meta.f_max * math.fsum(p * eps[i][c] for (i, c), p in q.by_level.items())
        if record.regret_increment > bound + 1e-9:
            raise AssertionError(
                f"round {record.t}: regret {record.regret_increment} exceeds stability bound {bound}"
            )


def run_online(
    problem: Problem,
    true_specs: Sequence[TrueDistSpec],
    horizon: int,
    seed: int = 0,
    config: LearnerConfig | None = None,
    *,
    run: int = 0,
) -> list[RoundRecord]:
    """Re-solve on confidence-adjusted estimates every round.

    Unobserved items start at the optimistic point mass, which makes the
    solver probe them without any forced exploration.
    """
    cfg = config or LearnerConfig()
    loop = _Loop(problem, true_specs, horizon, seed, run, cfg)
    optimism = loop.meta.optimism
    n = problem.n
    estimates: list[DiscreteDist | None] = [None] * n
    seen = [-1] * n
    records = []
    for t in range(1, horizon + 1):
        if loop.continuous:
            policy = loop.solve_continuous(optimistic=True)
        else:
            for i in range(n):
                if seen[i] != loop.store.count(i):
                    estimates[i] = optimistic_estimate(loop.store, i, loop.delta, optimism)
                    seen[i] = loop.store.count(i)
            policy = problem.solve(estimates)
        rec = loop.play(t, policy)
        if cfg.debug and not loop.continuous:
            loop.check_stability(policy, estimates, rec)
        records.append(rec)
    return records


def run_etc(
    problem: Problem,
    true_specs: Sequence[TrueDistSpec],
    horizon: int,
    seed: int = 0,
    config: LearnerConfig | None = None,
    *,
    explore_rounds_per_item: int | None = None,
    run: int = 0,
) -> list[RoundRecord]:
    """Explore each item round-robin, then commit to the plain empirical optimum.

    The default budget is ceil(T^(2/3)) explorations per item.
    """
    cfg = config or LearnerConfig()
    n = problem.n
    m = math.ceil(horizon ** (2.0 / 3.0)) if explore_rounds_per_item is None else explore_rounds_per_item
    if m < 0 or m * n > horizon:
        raise ValueError(f"cannot explore {n} items {m} times each within {horizon} rounds")
    loop = _Loop(problem, true_specs, horizon, seed, run, cfg)
    optimism = loop.meta.optimism
    records = []
    committed: Policy | None = None
    for t in range(1, horizon + 1):
        if t <= m * n:
            policy = problem.explore_policy((t - 1) % n, (t - 1) // n)
        else:
            if committed is None:
                if loop.continuous:
                    committed = loop.solve_continuous(optimistic=False)
                else:
                    committed = problem.solve([empirical_estimate(loop.store, i, optimism) for i in range(n)])
            policy = committed
        records.append(loop.play(t, policy))
    return records


def run_clairvoyant(
    problem: Problem,
    true_specs: Sequence[TrueDistSpec],
    horizon: int,
    seed: int = 0,
    config: LearnerConfig | None = None,
    *,
    run: int = 0,
) -> list[RoundRecord]:
    """Play the optimal policy for the true distributions every round."""
    cfg = config or LearnerConfig()
    if not all(isinstance(s, DiscreteSpec) for s in true_specs):
        raise ValueError("the clairvoyant baseline needs discrete true distributions")
    loop = _Loop(problem, true_specs, horizon, seed, run, cfg)
    return [loop.play(t, loop.evaluator.optimal) for t in range(1, horizon + 1)]


ALGORITHMS = {"online": run_online, "etc": run_etc, "clairvoyant": run_clairvoyant}


def cumulative_regret(records: Sequence[RoundRecord]) -> list[tuple[int, float]]:
    """Prefix sums of expected regret increments."""
    out = []
    acc = 0.0
    for r in records:
        acc += r.regret_increment
        out.append((r.t, acc))
    return out


def cumulative_realized_regret(records: Sequence[RoundRecord]) -> list[tuple[int, float]]:
    out = []
    acc = 0.0
    for r in records:
        acc += r.realized_regret_increment
        out.append((r.t, acc))
    return out

