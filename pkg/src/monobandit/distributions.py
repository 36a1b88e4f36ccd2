"""Distribution value types, distances, dominance, truncation and sampling.

Discrete distributions live on an ascending support; mixed-support comparisons
merge the two supports and pad the missing values with zero mass.  Ground-truth
generators (``TrueDistSpec``) are separate from the learner's working
representation and only used by the simulator.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

NORM_TOL = 1e-12
RENORM_TOL = 1e-9
SNAP_TOL = 1e-9


class DistributionError(ValueError):
    """Raised when a distribution cannot be constructed from the given data."""


@dataclass(frozen=True)
class DiscreteDist:
    """Finite distribution over a strictly increasing support."""

    support: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        support = tuple(float(v) for v in self.support)
        probs = tuple(float(p) for p in self.probs)
        if not support:
            raise DistributionError("empty support")
        if len(support) != len(probs):
            raise DistributionError(
                f"support has {len(support)} values but probs has {len(probs)}"
            )
        if any(b <= a for a, b in zip(support, support[1:])):
            raise DistributionError(f"support must be strictly increasing: {support}")
        if any(p < 0.0 or math.isnan(p) for p in probs):
            raise DistributionError(f"negative probability in {probs}")
        total = math.fsum(probs)
        drift = abs(total - 1.0)
        if drift > RENORM_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        if drift > 0.0:
            probs = tuple(p / total for p in probs)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point_mass(cls, value: float, support: Sequence[float] | None = None) -> DiscreteDist:
        """Unit mass at ``value``, optionally embedded in a wider support."""
        if support is None:
            return cls((value,), (1.0,))
        support = tuple(support)
        idx = support.index(value)
        probs = [0.0] * len(support)
        probs[idx] = 1.0
        return cls(support, tuple(probs))

    @classmethod
    def from_samples(cls, support: Sequence[float], samples: Iterable[float]) -> DiscreteDist:
        """Empirical distribution of ``samples`` over a declared support."""
        counts = count_on_support(support, samples)
        m = sum(counts)
        if m == 0:
            raise DistributionError("no samples")
        return cls(tuple(support), tuple(c / m for c in counts))

    @property
    def k(self) -> int:
        return len(self.support)

    @property
    def lo(self) -> float:
        return self.support[0]

    @property
    def hi(self) -> float:
        return self.support[-1]

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.support, self.probs))

    def cdf(self, x: float) -> float:
        """Pr[X <= x]."""
        j = bisect.bisect_right(self.support, x)
        return min(1.0, math.fsum(self.probs[:j]))

    def tail(self, x: float) -> float:
        """Pr[X >= x]."""
        j = bisect.bisect_left(self.support, x)
        return min(1.0, math.fsum(self.probs[j:]))

    def tails(self) -> list[float]:
        """Tail probabilities Pr[X >= a_c] for every support value a_c."""
        out = [0.0] * self.k
        acc = 0.0
        for j in range(self.k - 1, -1, -1):
            acc += self.probs[j]
            out[j] = min(acc, 1.0)
        return out

    def prob_of(self, value: float) -> float:
        j = bisect.bisect_left(self.support, value)
        if j < self.k and self.support[j] == value:
            return self.probs[j]
        return 0.0

    def to_step_cdf(self, lower: float | None = None, upper: float | None = None) -> StepCdf:
        cum = np.cumsum(self.probs)
        values = tuple(float(min(c, 1.0)) for c in cum)
        values = values[:-1] + (1.0,)
        return StepCdf(
            self.support,
            values,
            self.lo if lower is None else lower,
            self.hi if upper is None else upper,
        )


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous step CDF on ``[lower, upper]``.

    ``cdf_values[j]`` is the value of F on ``[breakpoints[j], breakpoints[j+1])``;
    F is 0 below the first breakpoint and the final value is 1.
    """

    breakpoints: tuple[float, ...]
    cdf_values: tuple[float, ...]
    lower: float
    upper: float

    def __post_init__(self) -> None:
        bps = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.cdf_values)
        if not bps or len(bps) != len(vals):
            raise DistributionError("breakpoints and cdf_values must be non-empty and aligned")
        if any(b <= a for a, b in zip(bps, bps[1:])):
            raise DistributionError("breakpoints must be strictly increasing")
        if any(b < a - NORM_TOL for a, b in zip(vals, vals[1:])) or vals[0] < -NORM_TOL:
            raise DistributionError("cdf values must be non-decreasing and non-negative")
        if abs(vals[-1] - 1.0) > RENORM_TOL:
            raise DistributionError(f"final cdf value must be 1, got {vals[-1]!r}")
        if bps[0] < self.lower - SNAP_TOL or bps[-1] > self.upper + SNAP_TOL:
            raise DistributionError("breakpoints fall outside [lower, upper]")
        vals = tuple(min(max(v, 0.0), 1.0) for v in vals[:-1]) + (1.0,)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "cdf_values", vals)

    def __call__(self, x: float) -> float:
        j = bisect.bisect_right(self.breakpoints, x)
        return 0.0 if j == 0 else self.cdf_values[j - 1]

    def left_limit(self, x: float) -> float:
        """F(x-)."""
        j = bisect.bisect_left(self.breakpoints, x)
        return 0.0 if j == 0 else self.cdf_values[j - 1]

    def to_discrete(self) -> DiscreteDist:
        """Masses at the jump points; zero jumps are dropped."""
        support, probs = [], []
        prev = 0.0
        for b, v in zip(self.breakpoints, self.cdf_values):
            jump = v - prev
            if jump > 0.0:
                support.append(b)
                probs.append(jump)
            prev = v
        return DiscreteDist(tuple(support), tuple(probs))


ProductDist = Sequence[DiscreteDist]


# --- ground-truth generators -------------------------------------------------


@dataclass(frozen=True)
class DiscreteSpec:
    dist: DiscreteDist
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        cum = np.cumsum(self.dist.probs)
        cum[-1] = 1.0
        object.__setattr__(self, "_cum", cum)

    @property
    def lower(self) -> float:
        return self.dist.lo

    @property
    def upper(self) -> float:
        return self.dist.hi

    def cdf(self, x: float) -> float:
        return self.dist.cdf(x)

    def left_cdf(self, x: float) -> float:
        return 1.0 - self.dist.tail(x)

    def ppf(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._cum, u, side="right")
        idx = np.minimum(idx, self.dist.k - 1)
        return np.asarray(self.dist.support)[idx]


@dataclass(frozen=True)
class UniformSpec:
    low: float
    high: float

    def __post_init__(self) -> None:
        if not self.low < self.high:
            raise DistributionError(f"uniform needs low < high, got [{self.low}, {self.high}]")

    @property
    def lower(self) -> float:
        return self.low

    @property
    def upper(self) -> float:
        return self.high

    def cdf(self, x: float) -> float:
        return min(max((x - self.low) / (self.high - self.low), 0.0), 1.0)

    left_cdf = cdf

    def ppf(self, u: np.ndarray) -> np.ndarray:
        return self.low + (self.high - self.low) * np.asarray(u)


@dataclass(frozen=True)
class PiecewiseLinearCdf:
    """Continuous CDF interpolating ``knots`` = ((x_0, 0), ..., (x_m, 1))."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        knots = tuple((float(x), float(f)) for x, f in self.knots)
        if len(knots) < 2:
            raise DistributionError("piecewise CDF needs at least two knots")
        xs = [x for x, _ in knots]
        fs = [f for _, f in knots]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise DistributionError("knot positions must be strictly increasing")
        if any(b < a for a, b in zip(fs, fs[1:])):
            raise DistributionError("knot CDF values must be non-decreasing")
        if fs[0] != 0.0 or fs[-1] != 1.0:
            raise DistributionError("piecewise CDF must run from 0 to 1")
        object.__setattr__(self, "knots", knots)

    @property
    def lower(self) -> float:
        return self.knots[0][0]

    @property
    def upper(self) -> float:
        return self.knots[-1][0]

    def cdf(self, x: float) -> float:
        xs = [k[0] for k in self.knots]
        fs = [k[1] for k in self.knots]
        return float(np.interp(x, xs, fs))

    left_cdf = cdf

    def ppf(self, u: np.ndarray) -> np.ndarray:
        xs = np.array([k[0] for k in self.knots])
        fs = np.array([k[1] for k in self.knots])
        # flat segments of the CDF carry no mass; interp over the strictly rising part
        keep = np.concatenate(([True], np.diff(fs) > 0))
        return np.interp(u, fs[keep], xs[keep])


TrueDistSpec = Union[DiscreteSpec, UniformSpec, PiecewiseLinearCdf]


def is_discrete(spec: TrueDistSpec) -> bool:
    return isinstance(spec, DiscreteSpec)


# --- merged-support helpers ---------------------------------------------------


def merged(d: DiscreteDist, e: DiscreteDist) -> tuple[list[float], list[float], list[float]]:
    """Union support with both probability vectors zero-padded onto it."""
    values = sorted(set(d.support) | set(e.support))
    pd = dict(zip(d.support, d.probs))
    pe = dict(zip(e.support, e.probs))
    return values, [pd.get(v, 0.0) for v in values], [pe.get(v, 0.0) for v in values]


def tv_distance(d: DiscreteDist, e: DiscreteDist) -> float:
    """Half the l1 distance over the merged support."""
    if d.support == e.support:
        return min(1.0, 0.5 * math.fsum(abs(a - b) for a, b in zip(d.probs, e.probs)))
    _, pd, pe = merged(d, e)
    return min(1.0, 0.5 * math.fsum(abs(a - b) for a, b in zip(pd, pe)))


def dominates(e: DiscreteDist, d: DiscreteDist, tol: float = NORM_TOL) -> bool:
    """True iff Pr_e[X >= a] >= Pr_d[X >= a] at every merged support value."""
    _, pd, pe = merged(d, e)
    td = te = 0.0
    for a, b in zip(reversed(pd), reversed(pe)):
        td += a
        te += b
        if te < td - tol:
            return False
    return True


def ks_distance(f: StepCdf | DiscreteDist, g: StepCdf | DiscreteDist | TrueDistSpec) -> float:
    """Sup-norm distance between two CDFs.

    ``f`` is a step CDF.  ``g`` may be a step CDF (sup over both breakpoint sets)
    or a continuous ground-truth spec, in which case left limits of ``g`` at each
    breakpoint of ``f`` are compared as well.
    """
    if isinstance(f, DiscreteDist):
        f = f.to_step_cdf()
    if isinstance(g, DiscreteDist):
        g = g.to_step_cdf()
    if isinstance(g, DiscreteSpec):
        g = g.dist.to_step_cdf()
    if isinstance(g, StepCdf):
        points = sorted(set(f.breakpoints) | set(g.breakpoints))
        return max(abs(f(x) - g(x)) for x in points)
    # continuous g: on [b_j, b_{j+1}) f is flat and g rises from g(b_j) to g(b_{j+1}-)
    worst = 0.0
    prev_val = 0.0
    for b, v in zip(f.breakpoints, f.cdf_values):
        worst = max(worst, abs(prev_val - g.left_cdf(b)), abs(v - g.cdf(b)))
        prev_val = v
    return worst


def dominates_spec(e: StepCdf, spec: TrueDistSpec, tol: float = NORM_TOL) -> bool:
    """Dominance of a step CDF over a ground-truth spec: F_e <= F_spec everywhere."""
    return all(v <= spec.cdf(b) + tol for b, v in zip(e.breakpoints, e.cdf_values))


def _check_level(d: DiscreteDist, c: int) -> None:
    if not 1 <= c <= d.k:
        raise IndexError(f"level {c} outside 1..{d.k}")


def truncate(d: DiscreteDist, c: int) -> DiscreteDist:
    """Distribution of min(X, a_c) on {a_1..a_c}; ``c`` is 1-based."""
    _check_level(d, c)
    head = d.probs[: c - 1]
    top = max(0.0, 1.0 - math.fsum(head))
    return DiscreteDist(d.support[:c], head + (top,))


def binary_compress(d: DiscreteDist, c: int) -> DiscreteDist:
    """Distribution of the indicator I[X >= a_c] on {0, 1}; ``c`` is 1-based."""
    _check_level(d, c)
    hit = min(1.0, math.fsum(d.probs[c - 1 :]))
    return DiscreteDist((0.0, 1.0), (1.0 - hit, hit))


def expected_min(d: DiscreteDist, m: float) -> float:
    return math.fsum(p * min(v, m) for v, p in zip(d.support, d.probs))


def expected_excess(d: DiscreteDist, r: float) -> float:
    return math.fsum(p * (v - r) for v, p in zip(d.support, d.probs) if v > r)


# --- sampling ----------------------------------------------------------------


def item_stream(seed: int, item: int, run: int = 0) -> np.random.Generator:
    """Independent counter-based stream for one (run, item) pair."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(run, item))
    return np.random.Generator(np.random.Philox(ss))


def sample(spec: TrueDistSpec, rng: np.random.Generator) -> float:
    """One inverse-CDF draw."""
    return float(spec.ppf(np.array([rng.random()]))[0])


def sample_many(spec: TrueDistSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    return spec.ppf(rng.random(size))


def snap_index(support: Sequence[float], x: float) -> int:
    """Index of the support value equal to ``x`` within ``SNAP_TOL``."""
    j = bisect.bisect_left(support, x - SNAP_TOL)
    if j < len(support) and abs(support[j] - x) <= SNAP_TOL:
        return j
    raise DistributionError(f"sample {x!r} is not a support value of {tuple(support)}")


def count_on_support(support: Sequence[float], samples: Iterable[float]) -> list[int]:
    counts = [0] * len(support)
    for x in samples:
        counts[snap_index(support, x)] += 1
    return counts


# --- config blocks -----------------------------------------------------------


def spec_from_config(block: dict) -> TrueDistSpec:
    """Build a spec from ``support``/``probs``, ``uniform`` or ``piecewise_cdf``."""
    keys = {"support", "probs", "uniform", "piecewise_cdf"} & set(block)
    if "uniform" in keys:
        low, high = block["uniform"]
        return UniformSpec(float(low), float(high))
    if "piecewise_cdf" in keys:
        return PiecewiseLinearCdf(tuple(tuple(k) for k in block["piecewise_cdf"]))
    if "support" in keys and "probs" in keys:
        return DiscreteSpec(DiscreteDist(tuple(block["support"]), tuple(block["probs"])))
    raise DistributionError(
        "distribution block needs 'support' and 'probs', 'uniform', or 'piecewise_cdf'"
    )


def spec_to_config(spec: TrueDistSpec) -> dict:
    if isinstance(spec, DiscreteSpec):
        return {"support": list(spec.dist.support), "probs": list(spec.dist.probs)}
    if isinstance(spec, UniformSpec):
        return {"uniform": [spec.low, spec.high]}
    return {"piecewise_cdf": [list(k) for k in spec.knots]}
