"""Optimistic and pessimistic empirical distributions.

Each constructor takes observations of one item and returns a distribution that,
with probability at least ``1 - delta``, stochastically dominates (or, for the
``_down`` variant, is dominated by) the unknown truth while staying close to it.
All widths use the natural log and are capped at 1.  The keyword-only ``eps``
and ``widths`` arguments replace the derived widths outright; ``delta`` is
then unused.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .distributions import (
    SNAP_TOL,
    DiscreteDist,
    DistributionError,
    StepCdf,
    count_on_support,
    snap_index,
)


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def dkw_width(delta: float, m: int) -> float:
    """sqrt(log(2/delta) / 2m), capped at 1; 1 when there are no samples."""
    if m <= 0:
        return 1.0
    return min(1.0, math.sqrt(math.log(2.0 / delta) / (2.0 * m)))


def level_width(delta: float, k: int, m: int) -> float:
    """sqrt(log(2k/delta) / 2m), capped at 1; 1 when there are no samples."""
    if m <= 0:
        return 1.0
    return min(1.0, math.sqrt(math.log(2.0 * k / delta) / (2.0 * m)))


@dataclass(frozen=True)
class ConfidenceParams:
    """Failure probability, sample counts and the widths derived from them."""

    delta: float
    counts: tuple[int, ...]
    epsilons: tuple[float, ...]

    @classmethod
    def single(cls, delta: float, m: int) -> ConfidenceParams:
        return cls(delta, (m,), (dkw_width(delta, m),))

    @classmethod
    def per_level(cls, delta: float, counts: Sequence[int]) -> ConfidenceParams:
        k = len(counts)
        return cls(delta, tuple(counts), tuple(level_width(delta, k, m) for m in counts))


# --- semi-bandit ------------------------------------------------------------


def shift_up(probs: Sequence[float], eps: float) -> list[float]:
    """Move ``eps`` mass from the lowest values onto the top value."""
    k = len(probs)
    top = min(probs[-1] + eps, 1.0)
    if top >= 1.0:
        out = [0.0] * k
        out[-1] = 1.0
        return out
    out = list(probs)
    out[-1] = top
    acc = 0.0
    for y in range(k - 1):
        acc += probs[y]
        if acc >= eps:
            out[y] = acc - eps
            break
        out[y] = 0.0
    return out


def _width(delta: float, m: int, eps: float | None) -> float:
    if eps is not None:
        if eps < 0:
            raise ValueError(f"eps must be non-negative, got {eps!r}")
        return min(eps, 1.0)
    _check_delta(delta)
    return dkw_width(delta, m)


def emp_stoc_dom_counts(
    support: Sequence[float], counts: Sequence[int], delta: float, *, eps: float | None = None
) -> DiscreteDist:
    """Dominating distribution from per-support-value sample counts."""
    m = sum(counts)
    support = tuple(support)
    eps = _width(delta, m, eps)
    if m == 0:
        return DiscreteDist.point_mass(support[-1], support)
    return DiscreteDist(support, tuple(shift_up([c / m for c in counts], eps)))


def emp_stoc_dom(
    support: Sequence[float], samples: Sequence[float], delta: float, *, eps: float | None = None
) -> DiscreteDist:
    """Empirical distribution with an ``eps`` slice of mass lifted to the top value.

    With no samples the result is the point mass at the largest support value.
    """
    return emp_stoc_dom_counts(support, count_on_support(support, samples), delta, eps=eps)


def emp_stoc_dom_down_counts(
    support: Sequence[float], counts: Sequence[int], delta: float, *, eps: float | None = None
) -> DiscreteDist:
    m = sum(counts)
    support = tuple(support)
    eps = _width(delta, m, eps)
    if m == 0:
        return DiscreteDist.point_mass(support[0], support)
    mirrored = shift_up([c / m for c in reversed(counts)], eps)
    return DiscreteDist(support, tuple(reversed(mirrored)))


def emp_stoc_dom_down(
    support: Sequence[float], samples: Sequence[float], delta: float, *, eps: float | None = None
) -> DiscreteDist:
    """Mirror image of :func:`emp_stoc_dom`: mass moves down onto the smallest value."""
    return emp_stoc_dom_down_counts(support, count_on_support(support, samples), delta, eps=eps)


# --- continuous ---------------------------------------------------------------


def emp_stoc_dom_cts(
    samples: Sequence[float], bounds: tuple[float, float], delta: float, *, eps: float | None = None
) -> StepCdf:
    """Empirical CDF lowered by ``eps`` below the upper bound, 1 at and above it."""
    a, b = float(bounds[0]), float(bounds[1])
    if not samples:
        raise ValueError("at least one sample is required")
    xs = sorted(float(x) for x in samples)
    if xs[0] < a - SNAP_TOL or xs[-1] > b + SNAP_TOL:
        raise DistributionError(f"samples must lie in [{a}, {b}]")
    m = len(xs)
    eps = _width(delta, m, eps)
    breakpoints: list[float] = []
    values: list[float] = []
    i = 0
    while i < m:
        x = xs[i]
        while i < m and xs[i] == x:
            i += 1
        if x >= b - SNAP_TOL:
            break
        breakpoints.append(x)
        values.append(max(i / m - eps, 0.0))
    breakpoints.append(b)
    values.append(1.0)
    return StepCdf(tuple(breakpoints), tuple(values), a, b)


# --- censored / binary ----------------------------------------------------------


def transfer_up(top_estimates: Sequence[float], widths: Sequence[float]) -> list[float]:
    """Level-by-level mass transfer from a_c to a_{c+1}.

    ``top_estimates[c]`` estimates Pr[X >= a_{c+1}] (0-based); entry 0 is unused.
    """
    k = len(top_estimates)
    e = [0.0] * k
    e[0] = 1.0
    for c in range(k - 1):
        moved = min(e[c], top_estimates[c + 1] + widths[c + 1])
        e[c + 1] = moved
        e[c] = e[c] - moved
    return e


def censored_dominating_counts(
    support: Sequence[float],
    effective: Sequence[int],
    top_hits: Sequence[int],
    delta: float,
    *,
    widths: Sequence[float] | None = None,
) -> DiscreteDist:
    """Core of :func:`censored_dominating` on running counts.

    ``effective[c]`` is the number of samples informative about level c+1 and
    ``top_hits[c]`` how many of them reached a_{c+1}.
    """
    k = len(support)
    p_hat = [h / n if n else 0.0 for h, n in zip(top_hits, effective)]
    if widths is None:
        _check_delta(delta)
        half_log = math.log(2.0 * k / delta) / 2.0
        widths = [min(1.0, math.sqrt(half_log / n)) if n > 0 else 1.0 for n in effective]
    return DiscreteDist(tuple(support), tuple(transfer_up(p_hat, widths)))


def censored_counts(
    support: Sequence[float], censored_samples: Mapping[int, Sequence[float]]
) -> tuple[list[int], list[int]]:
    """Effective counts n_c and top hits per level from level -> samples."""
    k = len(support)
    effective = [0] * k
    top_hits = [0] * k
    for level, values in censored_samples.items():
        if not 1 <= level <= k:
            raise DistributionError(f"level {level} outside 1..{k}")
        for y in values:
            j = snap_index(support, y)
            if j > level - 1:
                raise DistributionError(
                    f"censored sample {y!r} exceeds the level-{level} cap {support[level - 1]!r}"
                )
            for c in range(level):
                effective[c] += 1
                if j >= c:
                    top_hits[c] += 1
    return effective, top_hits


def censored_dominating(
    support: Sequence[float],
    censored_samples: Mapping[int, Sequence[float]],
    delta: float,
    *,
    widths: Sequence[float] | None = None,
) -> DiscreteDist:
    """Dominating distribution from censored samples ``{level c: [min(x, a_c), ...]}``.

    Levels are 1-based.  A level-c sample is also a sample of min(X, a_b) for every
    b <= c, so level b pools all samples taken at levels >= b.
    """
    effective, top_hits = censored_counts(support, censored_samples)
    return censored_dominating_counts(support, effective, top_hits, delta, widths=widths)


def binary_dominating(
    support: Sequence[float],
    binary_counts: Mapping[int, tuple[int, int]],
    delta: float,
    *,
    widths: Sequence[float] | None = None,
) -> DiscreteDist:
    """Dominating distribution from ``{level c: (successes, trials)}`` of I[X >= a_c].

    A level without trials gets p_hat = 0 and width 1.
    """
    if widths is None:
        _check_delta(delta)
    k = len(support)
    p_hat = [0.0] * k
    derived = [1.0] * k
    for level, (succ, trials) in binary_counts.items():
        if not 1 <= level <= k:
            raise DistributionError(f"level {level} outside 1..{k}")
        if not 0 <= succ <= trials:
            raise DistributionError(f"level {level}: successes {succ} exceed trials {trials}")
        if trials:
            p_hat[level - 1] = succ / trials
            if widths is None:
                derived[level - 1] = level_width(delta, k, trials)
    return DiscreteDist(tuple(support), tuple(transfer_up(p_hat, derived if widths is None else widths)))


def monotone_from_tails(support: Sequence[float], tails: Sequence[float]) -> DiscreteDist:
    """Distribution whose tail at a_c is the running minimum of ``tails``.

    This is the zero-width transfer, used as the plain empirical estimate for
    censored and binary data.
    """
    return DiscreteDist(tuple(support), tuple(transfer_up(list(tails), [0.0] * len(tails))))
