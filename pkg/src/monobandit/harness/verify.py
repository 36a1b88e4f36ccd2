"""Randomized self-checks: solver against oracle, monotonicity and stability."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..distributions import DiscreteDist
from ..oracle import brute_force_opt, check_monotonicity, stability_terms
from ..policy import exact_value
from ..problems import KINDS, Fspm, Pandora, Problem, Prophet, SeriesTesting, Srm


def random_dist(rng: np.random.Generator, support) -> DiscreteDist:
    """Random probabilities on ``support``, sometimes with a zero-mass value."""
    p = rng.dirichlet(np.full(len(support), 0.8))
    if len(p) > 1 and rng.random() < 0.25:
        p[rng.integers(len(p))] = 0.0
        p /= p.sum()
    return DiscreteDist(tuple(support), tuple(p.tolist()))


def random_instance(
    kind: str, rng: np.random.Generator, *, max_n: int = 4, max_k: int = 3, max_cap: int = 3, max_kappa: int = 2
) -> tuple[Problem, list[DiscreteDist]]:
    n = int(rng.integers(1, max_n + 1))
    if kind == "series_testing":
        prob: Problem = SeriesTesting(tuple(np.round(rng.uniform(0.1, 3.0, n), 3).tolist()))
    elif kind == "srm":
        cap = int(rng.integers(1, max_cap + 1))
        prices = sorted(rng.choice(np.arange(1, 20), n, replace=False).tolist(), reverse=True)
        prob = Srm(tuple(float(p) for p in prices), cap)
    else:
        supports = []
        for _ in range(n):
            k = int(rng.integers(1, max_k + 1))
            supports.append(tuple(float(v) for v in sorted(rng.choice(np.arange(0, 11), k, replace=False))))
        if kind == "pandora":
            prob = Pandora(tuple(rng.choice([0.0, 0.25, 0.5, 1.0, 2.0, 4.0], n).tolist()), tuple(supports))
        elif kind == "prophet":
            prob = Prophet(tuple(supports))
        elif kind == "fspm":
            prob = Fspm(tuple(supports), int(rng.integers(1, max_kappa + 1)))
        else:
            raise ValueError(f"unknown kind {kind!r}")
    return prob, [random_dist(rng, s) for s in prob.supports]


def random_dominating(d: DiscreteDist, rng: np.random.Generator, strength: float = 0.5) -> DiscreteDist:
    """Push a random share of each value's mass to a random higher value."""
    p = np.array(d.probs)
    k = d.k
    for j in range(k - 1):
        share = p[j] * rng.uniform(0.0, strength)
        dest = int(rng.integers(j + 1, k))
        p[j] -= share
        p[dest] += share
    p = np.clip(p, 0.0, None)
    return DiscreteDist(d.support, tuple((p / p.sum()).tolist()))


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def oracle_suite(instances_per_kind: int, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("oracle equivalence")
    rng = np.random.default_rng(seed)
    for kind in KINDS:
        for _ in range(instances_per_kind):
            prob, dist = random_instance(kind, rng)
            got = exact_value(prob.solve(dist), dist)
            want = brute_force_opt(prob, dist).optimum
            rep.checked += 1
            if abs(got - want) > 1e-9:
                rep.failures.append(f"{kind}: solver {got!r} vs oracle {want!r} on {prob!r}")
    return rep


def monotonicity_suite(pairs_per_kind: int, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("monotonicity")
    rng = np.random.default_rng(seed + 1)
    for kind in KINDS:
        for _ in range(pairs_per_kind):
            prob, d = random_instance(kind, rng)
            e = [random_dominating(di, rng) for di in d]
            rep.checked += 1
            if not check_monotonicity(prob, d, e):
                rep.failures.append(f"{kind}: optimum moved the wrong way on {prob!r}")
    return rep


def stability_suite(instances: int, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("stability")
    rng = np.random.default_rng(seed + 2)
    for i in range(instances):
        kind = KINDS[i % len(KINDS)]
        prob, d = random_instance(kind, rng)
        e = [random_dominating(di, rng, strength=float(rng.uniform(0.05, 1.0))) for di in d]
        res = stability_terms(prob, d, e, 1.0, prob.solve(e))
        rep.checked += 1
        if not res.ok:
            rep.failures.append(f"{kind}: gap {res.gap!r} above bound {res.bound!r} on {prob!r}")
    return rep
