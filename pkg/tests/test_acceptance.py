"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The three regret benchmarks run once per session and are shared by the
scaling, clairvoyant and reproducibility checks.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from monobandit.distributions import DiscreteDist, DiscreteSpec, dominates, tv_distance
from monobandit.harness.config import load_config
from monobandit.harness.csvio import read_rows
from monobandit.harness.experiment import run_experiment, slopes
from monobandit.harness.sampletest import SAMPLERS, sampling_guarantee_test
from monobandit.harness.verify import monotonicity_suite, oracle_suite, stability_suite
from monobandit.sampling import (
    binary_dominating,
    censored_counts,
    censored_dominating_counts,
    dkw_width,
    emp_stoc_dom_counts,
    emp_stoc_dom_cts,
    emp_stoc_dom_down_counts,
    level_width,
    monotone_from_tails,
)

pytestmark = pytest.mark.acceptance

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
BENCHMARKS = ("pandora", "srm", "fspm")
TOL = 1e-12


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    """Lazily run each benchmark config once: name -> (config, result, seconds)."""
    cache = {}
    root = tmp_path_factory.mktemp("bench")

    def get(name):
        if name not in cache:
            cfg = load_config(CONFIGS / f"{name}_benchmark.toml")
            cfg.out_dir = root / name
            start = time.perf_counter()
            result = run_experiment(cfg)
            cache[name] = (cfg, result, time.perf_counter() - start)
        return cache[name]

    return get


# --- 1 ------------------------------------------------------------------------


def test_1_oracle_equivalence(report):
    start = time.perf_counter()
    rep = oracle_suite(100, seed=0)
    secs = time.perf_counter() - start
    ok = rep.passed and rep.checked == 500 and secs <= 60
    report("1 oracle equivalence", ok, f"{rep.checked} instances, {len(rep.failures)} mismatches, {secs:.1f}s")
    assert ok, rep.failures[:3]


# --- 2 ------------------------------------------------------------------------


def test_2_sampling_guarantee(report):
    truth = DiscreteDist((0.0, 1.0, 2.0), (1 / 3, 1 / 3, 1 / 3))
    start = time.perf_counter()
    results = [sampling_guarantee_test(truth, [16, 64, 256], 0.1, 2000, sampler=s, seed=0) for s in SAMPLERS]
    secs = time.perf_counter() - start
    for res in results:
        rates = ", ".join(f"m={m}: {r:.4f}" for m, r in res.rates.items())
        report(f"2 sampling guarantee [{res.sampler}]", res.passed, f"{rates}; limit 0.12")
    report("2 sampling guarantee runtime", secs <= 120, f"{secs:.1f}s")
    assert all(r.passed for r in results) and secs <= 120


# --- 3 ------------------------------------------------------------------------

FUZZ = 10_000


def _support(rng, k):
    return tuple(float(v) for v in np.sort(rng.choice(np.arange(20), k, replace=False)))


def _valid(d: DiscreteDist) -> bool:
    return all(p >= 0.0 for p in d.probs) and abs(math.fsum(d.probs) - 1.0) <= TOL


def _fuzz_semi(rng, down):
    k = int(rng.integers(1, 5))
    support = _support(rng, k)
    counts = rng.multinomial(int(rng.integers(1, 60)), rng.dirichlet(np.ones(k))).tolist()
    delta = float(rng.uniform(1e-6, 0.99))
    eps = dkw_width(delta, sum(counts))
    emp = DiscreteDist(support, tuple(c / sum(counts) for c in counts))
    if down:
        out = emp_stoc_dom_down_counts(support, counts, delta)
        return _valid(out) and dominates(emp, out) and tv_distance(out, emp) <= eps + TOL
    out = emp_stoc_dom_counts(support, counts, delta)
    return _valid(out) and dominates(out, emp) and tv_distance(out, emp) <= eps + TOL


def _fuzz_cts(rng):
    m = int(rng.integers(1, 40))
    # a coarse grid forces ties and samples at the upper bound
    samples = (rng.integers(0, 11, m) / 10.0).tolist() if rng.random() < 0.5 else rng.random(m).tolist()
    delta = float(rng.uniform(1e-6, 0.99))
    eps = dkw_width(delta, m)
    f = emp_stoc_dom_cts(samples, (0.0, 1.0), delta)
    xs = np.sort(samples)
    points = sorted(set(samples) | set(f.breakpoints))
    emp = [np.searchsorted(xs, x, side="right") / m for x in points]
    vals = f.cdf_values
    return (
        vals[-1] == 1.0
        and all(0.0 <= a <= b <= 1.0 for a, b in zip(vals, vals[1:]))
        and all(f(x) <= e + TOL for x, e in zip(points, emp))
        and max(abs(f(x) - e) for x, e in zip(points, emp)) <= eps + TOL
    )


def _fuzz_levels(rng, binary):
    k = int(rng.integers(1, 5))
    support = _support(rng, k)
    delta = float(rng.uniform(1e-6, 0.99))
    if binary:
        data = {}
        for c in range(1, k + 1):
            if rng.random() < 0.8:
                trials = int(rng.integers(1, 40))
                data[c] = (int(rng.integers(0, trials + 1)), trials)
        out = binary_dominating(support, data, delta)
        p_hat = [data[c][0] / data[c][1] if c in data else 0.0 for c in range(1, k + 1)]
        widths = [level_width(delta, k, data[c][1]) if c in data else 1.0 for c in range(1, k + 1)]
    else:
        data = {}
        for c in range(1, k + 1):
            n = int(rng.integers(0, 15))
            if n:
                data[c] = [support[j] for j in rng.integers(0, c, n)]
        effective, hits = censored_counts(support, data)
        out = censored_dominating_counts(support, effective, hits, delta)
        p_hat = [h / n if n else 0.0 for h, n in zip(hits, effective)]
        widths = [level_width(delta, k, n) for n in effective]
    emp = monotone_from_tails(support, p_hat)
    bound = (k - 1) * max(widths[1:], default=0.0)
    return _valid(out) and dominates(out, emp) and tv_distance(out, emp) <= bound + TOL


def test_3_deterministic_sampler_invariants(report):
    checks = {
        "emp_stoc_dom": lambda rng: _fuzz_semi(rng, down=False),
        "emp_stoc_dom_down": lambda rng: _fuzz_semi(rng, down=True),
        "emp_stoc_dom_cts": _fuzz_cts,
        "censored": lambda rng: _fuzz_levels(rng, binary=False),
        "binary": lambda rng: _fuzz_levels(rng, binary=True),
    }
    ok_all = True
    for j, (name, check) in enumerate(checks.items()):
        rng = np.random.default_rng(1000 + j)
        failures = sum(not check(rng) for _ in range(FUZZ))
        report(f"3 sampler invariants [{name}]", failures == 0, f"{FUZZ} calls, {failures} failures")
        ok_all &= failures == 0
    assert ok_all


# --- 4, 5 ---------------------------------------------------------------------


def test_4_stability_bound(report):
    start = time.perf_counter()
    rep = stability_suite(500, seed=0)
    secs = time.perf_counter() - start
    ok = rep.passed and rep.checked == 500 and secs <= 60
    report("4 stability bound", ok, f"{rep.checked} instances, {len(rep.failures)} violations, {secs:.1f}s")
    assert ok, rep.failures[:3]


def test_5_monotonicity(report):
    rep = monotonicity_suite(200, seed=0)
    ok = rep.passed and rep.checked == 1000
    report("5 monotonicity", ok, f"{rep.checked} coupled pairs, {len(rep.failures)} violations")
    assert ok, rep.failures[:3]


# --- 6, 7 ---------------------------------------------------------------------


def _scaling(bench, report, name, label, online_window, etc_min=None):
    cfg, result, secs = bench(name)
    s = slopes(result, ["online", "etc"])
    final = {alg: dict(result.final_points(alg))[cfg.horizons[-1]] for alg in ("online", "etc")}
    lo, hi = online_window
    checks = [
        lo <= s["online"] <= hi,
        final["online"] < final["etc"],
        secs <= 600,
        not result.failures,
    ]
    if etc_min is not None:
        checks.append(s["etc"] >= etc_min)
    ok = all(checks)
    detail = (
        f"online slope {s['online']:.3f} in [{lo}, {hi}], etc slope {s['etc']:.3f}"
        + (f" >= {etc_min}" if etc_min is not None else "")
        + f", regret at T={cfg.horizons[-1]}: online {final['online']:.1f} < etc {final['etc']:.1f}"
        + f", {len(cfg.seeds)} seeds, {secs:.0f}s"
    )
    report(label, ok, detail)
    assert ok


def test_6_pandora_regret_scaling(bench, report):
    _scaling(bench, report, "pandora", "6 regret scaling [pandora]", (0.40, 0.65), etc_min=0.62)


def test_7_censored_regret_scaling(bench, report):
    _scaling(bench, report, "srm", "7 censored scaling [srm]", (0.40, 0.68))


def test_7_binary_regret_scaling(bench, report):
    _scaling(bench, report, "fspm", "7 binary scaling [fspm]", (0.40, 0.68))


# --- 8 ------------------------------------------------------------------------


def test_8_clairvoyant_floor(bench, report, tmp_path):
    worst = {}
    for name in BENCHMARKS:
        _, result, _ = bench(name)
        rows = [r for r in result.rows if r.algorithm == "clairvoyant"]
        assert rows
        worst[name] = max(abs(r.cum_expected_regret) for r in rows)
    quick = load_config(CONFIGS / "quick_prophet.toml")
    quick.out_dir = tmp_path
    rows = [r for r in run_experiment(quick).rows if r.algorithm == "clairvoyant"]
    worst["quick_prophet"] = max(abs(r.cum_expected_regret) for r in rows)
    ok = all(v <= 1e-6 for v in worst.values())
    report("8 clairvoyant floor", ok, ", ".join(f"{k} max |regret| {v:.1e}" for k, v in worst.items()))
    assert ok


# --- 9 ------------------------------------------------------------------------


def test_9_reproducibility(bench, report, tmp_path):
    results = []
    quick = load_config(CONFIGS / "quick_prophet.toml")
    paths = []
    for run in ("a", "b"):
        quick.out_dir = tmp_path / f"quick_{run}"
        paths.append(run_experiment(quick).paths)
    results.append(("quick_prophet", all(paths[0][k].read_bytes() == paths[1][k].read_bytes() for k in paths[0])))
    for name in BENCHMARKS:
        cfg, full, _ = bench(name)
        cfg2 = load_config(CONFIGS / f"{name}_benchmark.toml")
        cfg2.seeds = cfg2.seeds[:2]
        reruns = []
        for run in ("a", "b"):
            cfg2.out_dir = tmp_path / f"{name}_{run}"
            reruns.append(run_experiment(cfg2).paths)
        same = all(reruns[0][alg].read_bytes() == reruns[1][alg].read_bytes() for alg in cfg2.algorithms)
        # the two-seed lines must match the full 50-seed run line for line
        for alg in cfg2.algorithms:
            full_lines = full.paths[alg].read_text().splitlines()
            sub_lines = reruns[0][alg].read_text().splitlines()
            keep = [full_lines[0]] + [ln for ln in full_lines[1:] if int(ln.split(",")[1]) in cfg2.seeds]
            same &= keep == sub_lines
            same &= read_rows(full.paths[alg]) == sorted(read_rows(full.paths[alg]), key=lambda r: (r.algorithm, r.seed, r.t))
        results.append((name, same))
    ok = all(s for _, s in results)
    report("9 reproducibility", ok, ", ".join(f"{n} {'identical' if s else 'DIFFERENT'}" for n, s in results))
    assert ok
