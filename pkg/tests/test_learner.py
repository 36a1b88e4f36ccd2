import math

import numpy as np
import pytest

from monobandit.distributions import DiscreteDist, DiscreteSpec, UniformSpec, dominates
from monobandit.harness.verify import random_instance
from monobandit.learner import (
    ALGORITHMS,
    LearnerConfig,
    SampleStore,
    cumulative_realized_regret,
    cumulative_regret,
    default_delta,
    empirical_estimate,
    optimistic_estimate,
    run_clairvoyant,
    run_etc,
    run_online,
)
from monobandit.oracle import brute_force_opt
from monobandit.policy import FeedbackMode, Sense, exact_value, execute
from monobandit.problems import KINDS, Optimism, Pandora, Prophet, SeriesTesting, Srm
from monobandit.sampling import dkw_width

HALF = DiscreteDist((0.0, 1.0), (0.5, 0.5))


def specs(dists):
    return [DiscreteSpec(d) for d in dists]


def test_default_delta():
    assert default_delta(FeedbackMode.SEMI_BANDIT, 5, 3, 100) == pytest.approx(2 / 500**3)
    assert default_delta(FeedbackMode.CENSORED, 5, 3, 100) == pytest.approx(2 / 1500**3)
    # the default delta reproduces the width sqrt(3 log(nT) / 2N)
    n, t, m = 4, 2048, 33
    delta = default_delta(FeedbackMode.SEMI_BANDIT, n, 3, t)
    assert dkw_width(delta, m) == pytest.approx(math.sqrt(3 * math.log(n * t) / (2 * m)))


@pytest.mark.parametrize("kind", KINDS)
def test_clairvoyant_has_zero_regret(kind):
    prob, dist = random_instance(kind, np.random.default_rng(2))
    recs = run_clairvoyant(prob, specs(dist), 200, seed=1)
    assert len(recs) == 200
    assert all(abs(v) <= 1e-9 for _, v in cumulative_regret(recs))
    assert all(abs(v) <= 1e-9 for _, v in cumulative_realized_regret(recs))


def test_single_round_clairvoyant():
    prob = Prophet(((0.0, 1.0),) * 2)
    (rec,) = run_clairvoyant(prob, specs([HALF, HALF]), 1)
    assert rec.t == 1 and rec.expected_payoff == pytest.approx(0.75) and rec.exact


def test_point_mass_truth_learned_after_one_probe():
    prob = Prophet(((0.0, 2.0),))
    truth = DiscreteDist((0.0, 2.0), (0.0, 1.0))
    recs = run_online(prob, specs([truth]), 5)
    assert all(r.regret_increment == 0.0 for r in recs)
    low = DiscreteDist((0.0, 2.0), (1.0, 0.0))
    pan = Pandora((0.5,), ((0.0, 2.0),))
    recs = run_online(pan, specs([low]), 300)
    # inspections lose 0.5 each until the width drops below cost / top value
    assert recs[0].regret_increment == pytest.approx(0.5)
    assert recs[-1].regret_increment == 0.0
    delta = default_delta(FeedbackMode.SEMI_BANDIT, 1, 2, 300)
    needed = next(m for m in range(1, 300) if dkw_width(delta, m) < 0.25)
    assert sum(r.regret_increment > 0 for r in recs) == needed


@pytest.mark.parametrize("kind", KINDS)
def test_regret_increments_non_negative_and_reproducible(kind):
    prob, dist = random_instance(kind, np.random.default_rng(3))
    for alg in ALGORITHMS:
        a = ALGORITHMS[alg](prob, specs(dist), 120, seed=4)
        b = ALGORITHMS[alg](prob, specs(dist), 120, seed=4)
        assert a == b
        assert all(r.regret_increment >= -1e-9 for r in a)


def test_common_random_numbers_across_algorithms():
    prob, dist = random_instance("prophet", np.random.default_rng(5))
    on = run_online(prob, specs(dist), 64, seed=2)
    cl = run_clairvoyant(prob, specs(dist), 64, seed=2)
    # realized regret compares against the optimal policy on the same draws
    for a, b in zip(on, cl):
        assert b.realized_regret_increment == 0.0
        assert a.realized_regret_increment == pytest.approx(b.realized_payoff - a.realized_payoff)


@pytest.mark.parametrize("kind", KINDS)
def test_counter_law(kind):
    prob, dist = random_instance(kind, np.random.default_rng(6))
    store = SampleStore(prob.supports, prob.meta.feedback)
    rng = np.random.default_rng(0)
    pol = prob.solve(dist)
    for _ in range(30):
        x = [float(rng.choice(d.support, p=d.probs)) for d in dist]
        before = [store.count(i) for i in range(prob.n)]
        trace = execute(pol, x)
        for item, level, obs in trace.probed:
            store.record(item, level, obs)
        after = [store.count(i) for i in range(prob.n)]
        for i in range(prob.n):
            assert after[i] == before[i] + (1 if i in trace.items else 0)


@pytest.mark.parametrize("kind", KINDS)
def test_debug_mode_stability_holds(kind):
    prob, dist = random_instance(kind, np.random.default_rng(7))
    cfg = LearnerConfig(debug=True)
    run_online(prob, specs(dist), 150, seed=3, config=cfg)


@pytest.mark.parametrize("kind", KINDS)
def test_optimism_when_estimates_dominate(kind):
    rng = np.random.default_rng(8)
    checked = 0
    for trial in range(40):
        prob, dist = random_instance(kind, rng)
        store = SampleStore(prob.supports, prob.meta.feedback)
        explore = [prob.explore_policy(i, v) for v in range(3) for i in range(prob.n)]
        for pol in explore * 3:
            x = [float(rng.choice(d.support, p=d.probs)) for d in dist]
            for item, level, obs in execute(pol, x).probed:
                store.record(item, level, obs)
        est = [optimistic_estimate(store, i, 0.05, prob.meta.optimism) for i in range(prob.n)]
        if not all(dominates(e, d) for e, d in zip(est, dist)):
            continue
        checked += 1
        opt_d = brute_force_opt(prob, dist).optimum
        value_e = exact_value(prob.solve(est), est)
        if prob.meta.objective is Sense.MAX:
            assert value_e >= opt_d - 1e-9
        else:
            assert value_e <= opt_d + 1e-9
    assert checked > 10


def test_censored_store_rejects_out_of_level():
    store = SampleStore([(0.0, 1.0, 2.0)], FeedbackMode.CENSORED)
    with pytest.raises(ValueError):
        store.record(0, 2, 2.0)
    with pytest.raises(ValueError):
        store.record(0, None, 0.0)
    store.record(0, 3, 2.0)
    store.record(0, 2, 1.0)
    assert store.effective[0] == [2, 2, 1] and store.top_hits[0] == [2, 2, 1]
    assert store.level_count(0, 3) == 1 and store.level_count(0, 1) == 0


def test_dominated_estimates_need_semi_bandit():
    store = SampleStore([(0.0, 1.0)], FeedbackMode.BINARY)
    with pytest.raises(ValueError):
        optimistic_estimate(store, 0, 0.1, Optimism.DOMINATED)


def test_empirical_estimate_fallbacks():
    store = SampleStore([(0.0, 1.0, 2.0)], FeedbackMode.SEMI_BANDIT)
    assert empirical_estimate(store, 0, Optimism.DOMINATING) == DiscreteDist.point_mass(2.0, (0.0, 1.0, 2.0))
    assert empirical_estimate(store, 0, Optimism.DOMINATED) == DiscreteDist.point_mass(0.0, (0.0, 1.0, 2.0))
    binary = SampleStore([(0.0, 1.0, 2.0)], FeedbackMode.BINARY)
    binary.record(0, 2, 1.0)
    binary.record(0, 2, 0.0)
    # level 3 was never posted, so its tail stays at the level-2 estimate
    assert empirical_estimate(binary, 0, Optimism.DOMINATING).probs == pytest.approx((0.5, 0.0, 0.5))


def test_etc_budgets():
    prob = SeriesTesting((1.0, 2.0))
    truth = specs([DiscreteDist((0.0, 1.0), (0.7, 0.3)), DiscreteDist((0.0, 1.0), (0.2, 0.8))])
    t = 40
    pure = run_etc(prob, truth, t, explore_rounds_per_item=t // 2)
    explore_values = [exact_value(prob.explore_policy(i), [s.dist for s in truth]) for i in range(2)]
    opt = exact_value(prob.solve([s.dist for s in truth]), [s.dist for s in truth])
    expected = sum(v - opt for v in explore_values) * (t // 2)
    assert cumulative_regret(pure)[-1][1] == pytest.approx(expected)
    # with no exploration ETC commits to the prior at once
    idle = run_etc(prob, truth, t, explore_rounds_per_item=0)
    assert len({r.policy_key for r in idle}) == 1
    with pytest.raises(ValueError):
        run_etc(prob, truth, t, explore_rounds_per_item=t)


def test_etc_default_budget_is_t_two_thirds():
    prob = Prophet(((0.0, 1.0),) * 2)
    recs = run_etc(prob, specs([HALF, HALF]), 1000)
    explore = sum(1 for r in recs if r.policy_key[0] == "prophet-explore")
    assert explore == 2 * math.ceil(1000 ** (2 / 3))


def test_online_beats_etc_on_prophet_pair():
    prob = Prophet(((0.0, 1.0),) * 2)
    truth = specs([HALF, HALF])
    on = np.mean([cumulative_regret(run_online(prob, truth, 2048, seed=s))[-1][1] for s in range(5)])
    etc = np.mean([cumulative_regret(run_etc(prob, truth, 2048, seed=s))[-1][1] for s in range(5)])
    assert on < etc


def test_online_curve_is_sublinear():
    prob = Prophet(((0.0, 1.0),) * 2)
    truth = specs([DiscreteDist((0.0, 1.0), (0.6, 0.4)), HALF])
    curves = np.array([[v for _, v in cumulative_regret(run_online(prob, truth, 4096, seed=s))] for s in range(50)])
    mean = curves.mean(axis=0)
    # regret over the second half grows no faster than over the first half
    half = len(mean) // 2
    assert mean[-1] - mean[half - 1] <= mean[half - 1] + 1e-9


def test_continuous_truth_runs():
    prob = Prophet(((0.0, 1.0),) * 2)
    truth = [UniformSpec(0.0, 1.0), UniformSpec(0.0, 1.0)]
    cfg = LearnerConfig(mc_samples=500)
    recs = run_online(prob, truth, 30, seed=0, config=cfg)
    assert len(recs) == 30 and not recs[0].exact
    assert recs == run_online(prob, truth, 30, seed=0, config=cfg)
    etc = run_etc(prob, truth, 30, seed=0, config=cfg, explore_rounds_per_item=3)
    assert len(etc) == 30
    with pytest.raises(ValueError):
        run_clairvoyant(prob, truth, 10)
    with pytest.raises(ValueError):
        run_online(Srm((2.0,), 1), [UniformSpec(0.0, 1.0)], 5)


def test_horizon_and_item_checks():
    prob = Prophet(((0.0, 1.0),))
    with pytest.raises(ValueError):
        run_online(prob, specs([HALF]), 0)
    with pytest.raises(ValueError):
        run_online(prob, specs([HALF, HALF]), 5)
