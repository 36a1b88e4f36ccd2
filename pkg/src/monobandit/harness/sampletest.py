"""Monte Carlo checks that the estimators meet their high-probability guarantees."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..distributions import (
    DiscreteDist,
    DiscreteSpec,
    TrueDistSpec,
    binary_compress,
    dominates,
    dominates_spec,
    item_stream,
    ks_distance,
    truncate,
    tv_distance,
)
from ..sampling import (
    binary_dominating,
    censored_dominating_counts,
    dkw_width,
    emp_stoc_dom_counts,
    emp_stoc_dom_cts,
    emp_stoc_dom_down_counts,
)

SAMPLERS = ("emp_stoc_dom", "emp_stoc_dom_down", "emp_stoc_dom_cts", "censored", "binary")
SLACK_FACTOR = 1.2


@dataclass(frozen=True)
class SampleTestResult:
    sampler: str
    delta: float
    trials: int
    rates: dict[int, float]

    @property
    def threshold(self) -> float:
        return self.delta * SLACK_FACTOR

    @property
    def passed(self) -> bool:
        return all(r <= self.threshold for r in self.rates.values())


def _counts(idx: np.ndarray, k: int) -> list[int]:
    return np.bincount(idx, minlength=k).tolist()


def _trial_semi(truth: DiscreteDist, delta: float, m: int, rng: np.random.Generator, down: bool) -> bool:
    """True when the guarantee fails on one fresh batch of m samples."""
    cum = np.cumsum(truth.probs)
    idx = np.minimum(np.searchsorted(cum, rng.random(m), side="right"), truth.k - 1)
    counts = _counts(idx, truth.k)
    eps = dkw_width(delta, m)
    if down:
        out = emp_stoc_dom_down_counts(truth.support, counts, delta)
        ok = dominates(truth, out)
    else:
        out = emp_stoc_dom_counts(truth.support, counts, delta)
        ok = dominates(out, truth)
    return not (ok and tv_distance(out, truth) < truth.k * eps)


def _trial_cts(truth: TrueDistSpec, delta: float, m: int, rng: np.random.Generator) -> bool:
    xs = truth.ppf(rng.random(m)).tolist()
    out = emp_stoc_dom_cts(xs, (truth.lower, truth.upper), delta)
    return not (dominates_spec(out, truth) and ks_distance(out, truth) < 2 * dkw_width(delta, m))


def _trial_censored(truth: DiscreteDist, delta: float, m: int, rng: np.random.Generator) -> bool:
    # levels cycle through 1..k, so level c pools roughly m(k-c+1)/k samples
    k = truth.k
    cum = np.cumsum(truth.probs)
    idx = np.minimum(np.searchsorted(cum, rng.random(m), side="right"), k - 1)
    levels = np.arange(m) % k
    obs = np.minimum(idx, levels)
    effective = [int((levels >= c).sum()) for c in range(k)]
    hits = [int(((levels >= c) & (obs >= c)).sum()) for c in range(k)]
    out = censored_dominating_counts(truth.support, effective, hits, delta)
    if not dominates(out, truth):
        return True
    for c in range(1, k + 1):
        n_c = effective[c - 1]
        if n_c == 0:
            continue
        bound = k * math.sqrt(2 * math.log(2 * k / delta) / n_c)
        if tv_distance(truncate(out, c), truncate(truth, c)) >= bound:
            return True
    return False


def _trial_binary(truth: DiscreteDist, delta: float, m: int, rng: np.random.Generator) -> bool:
    # m threshold queries at every level
    k = truth.k
    tails = truth.tails()
    data = {c: (int(rng.binomial(m, min(tails[c - 1], 1.0))), m) for c in range(1, k + 1)}
    out = binary_dominating(truth.support, data, delta)
    if not dominates(out, truth):
        return True
    bound = math.sqrt(2 * math.log(2 * k / delta) / m)
    return any(
        tv_distance(binary_compress(out, c), binary_compress(truth, c)) >= bound for c in range(1, k + 1)
    )


def sampling_guarantee_test(
    truth: TrueDistSpec | DiscreteDist,
    m_values: Sequence[int],
    delta: float,
    trials: int,
    *,
    sampler: str = "emp_stoc_dom",
    seed: int = 0,
) -> SampleTestResult:
    """Failure rate of the estimator's guarantee for each sample size m."""
    if sampler not in SAMPLERS:
        raise ValueError(f"unknown sampler {sampler!r}; expected one of {SAMPLERS}")
    if isinstance(truth, DiscreteSpec):
        truth = truth.dist
    trial: Callable[[int, np.random.Generator], bool]
    if sampler == "emp_stoc_dom_cts":
        spec = DiscreteSpec(truth) if isinstance(truth, DiscreteDist) else truth
        trial = lambda m, rng: _trial_cts(spec, delta, m, rng)  # noqa: E731
    elif not isinstance(truth, DiscreteDist):
        raise ValueError(f"{sampler} needs a discrete truth")
    elif sampler == "censored":
        trial = lambda m, rng: _trial_censored(truth, delta, m, rng)  # noqa: E731
    elif sampler == "binary":
        trial = lambda m, rng: _trial_binary(truth, delta, m, rng)  # noqa: E731
    else:
        down = sampler == "emp_stoc_dom_down"
        trial = lambda m, rng: _trial_semi(truth, delta, m, rng, down)  # noqa: E731
    rates = {}
    for j, m in enumerate(m_values):
        rng = item_stream(seed, SAMPLERS.index(sampler), run=j)
        fails = sum(trial(m, rng) for _ in range(trials))
        rates[m] = fails / trials
    return SampleTestResult(sampler, delta, trials, rates)
