"""Seed aggregation and log-log slope fitting."""
from __future__ import annotations

import math
import warnings
from collections import defaultdict
from typing import Iterable, Sequence

import numpy as np

from .csvio import RegretCsvRow


def fit_loglog_slope(points: Iterable[tuple[float, float]]) -> float:
    """Least-squares slope of log(regret) against log(T).

    Points with non-positive regret are dropped with a warning.

    Raises:
        ValueError: fewer than three usable points remain.
    """
    pts = list(points)
    kept = [(t, r) for t, r in pts if t > 0 and r > 0]
    if len(kept) < len(pts):
        warnings.warn(f"dropped {len(pts) - len(kept)} non-positive point(s) from the slope fit", stacklevel=2)
    if len(kept) < 3:
        raise ValueError(f"need at least 3 positive points, have {len(kept)}")
    x = np.log([t for t, _ in kept])
    y = np.log([r for _, r in kept])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    if arr.size == 1:
        return float(arr[0]), 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def summarize(rows: Iterable[RegretCsvRow]) -> list[tuple]:
    """(algorithm, t, n_seeds, mean/stderr expected, mean/stderr realized) per (algorithm, t)."""
    groups: dict[tuple[str, int], list[RegretCsvRow]] = defaultdict(list)
    for r in rows:
        groups[(r.algorithm, r.t)].append(r)
    out = []
    for (alg, t), rs in sorted(groups.items()):
        m_e, s_e = mean_stderr([r.cum_expected_regret for r in rs])
        m_r, s_r = mean_stderr([r.cum_realized_regret for r in rs])
        out.append((alg, t, len(rs), m_e, s_e, m_r, s_r))
    return out


def curve(rows: Iterable[RegretCsvRow], algorithm: str) -> list[tuple[int, float, float]]:
    """Seed-averaged (t, mean, stderr) of cumulative expected regret for one algorithm."""
    return [(t, m, s) for alg, t, _, m, s, _, _ in summarize(rows) if alg == algorithm]
