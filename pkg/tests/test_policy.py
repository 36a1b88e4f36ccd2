import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monobandit.distributions import DiscreteDist, DiscreteSpec, item_stream
from monobandit.harness.verify import random_instance
from monobandit.policy import (
    FeedbackMode,
    Policy,
    PolicyError,
    Probe,
    StateBudgetExceeded,
    StopPolicy,
    exact_value,
    execute,
    monte_carlo_value,
    observe,
    probe_probabilities,
    value_and_probes,
)
from monobandit.problems import KINDS, ThresholdPolicy, solve_prophet, solve_series_testing

HALF = DiscreteDist((0.0, 1.0), (0.5, 0.5))


def prophet_pair():
    return ThresholdPolicy((0.5, 0.0), ((0.0, 1.0), (0.0, 1.0))), [HALF, HALF]


def test_stop_policy():
    pol = StopPolicy(7.0)
    trace = execute(pol, [])
    assert trace.payoff == 7.0 and trace.probed == ()
    assert exact_value(pol, [HALF]) == 7.0
    assert probe_probabilities(pol, [HALF]).by_item == {}
    mean, err = monte_carlo_value(pol, [DiscreteSpec(HALF)], 50, item_stream(0, 0))
    assert (mean, err) == (7.0, 0.0)


def test_series_trace_pays_prefix_cost():
    pol = solve_series_testing([0.5, 0.9], [1.0, 1.0])
    # first component works (0), second fails (1)
    trace = execute(pol, [0.0, 1.0])
    assert trace.items == (0, 1) and trace.payoff == 2.0
    assert execute(pol, [1.0, 0.0]).payoff == 1.0


def test_prophet_trace_and_value():
    pol, dists = prophet_pair()
    trace = execute(pol, [1.0, 0.0])
    assert trace.items == (0,) and trace.payoff == 1.0
    # ties at a threshold reject
    at_tau = ThresholdPolicy((1.0, 0.0), ((0.0, 1.0), (0.0, 1.0)))
    assert execute(at_tau, [1.0, 0.0]).items == (0, 1)
    assert exact_value(pol, dists) == pytest.approx(0.75)
    q = probe_probabilities(pol, dists)
    assert q.item(0) == 1.0 and q.item(1) == pytest.approx(0.5)


def test_series_exact_value():
    pol = solve_series_testing([0.5, 0.9], [1.0, 1.0])
    fail = [DiscreteDist((0.0, 1.0), (0.5, 0.5)), DiscreteDist((0.0, 1.0), (0.9, 0.1))]
    assert exact_value(pol, fail) == pytest.approx(1.5)


def test_monte_carlo_close_to_exact():
    pol, dists = prophet_pair()
    mean, err = monte_carlo_value(pol, [DiscreteSpec(d) for d in dists], 100_000, item_stream(3, 0))
    assert abs(mean - 0.75) < 0.01
    assert 0.0 < err < 0.01
    one, zero_err = monte_carlo_value(pol, [DiscreteSpec(d) for d in dists], 1, item_stream(3, 0))
    assert zero_err == 0.0 and one in (0.0, 1.0)
    with pytest.raises(ValueError):
        monte_carlo_value(pol, [DiscreteSpec(d) for d in dists], 0, item_stream(3, 0))


class _Reprobe(Policy):
    supports = ((0.0, 1.0),)

    @property
    def key(self):
        return "reprobe"

    def initial_state(self):
        return 0

    def decide(self, state):
        return Probe(0)

    def advance(self, state, probe, observation):
        return state + 1


def test_reprobe_is_a_hard_fault():
    with pytest.raises(PolicyError):
        execute(_Reprobe(), [1.0])
    with pytest.raises(PolicyError):
        exact_value(_Reprobe(), [HALF])


def test_state_budget(monkeypatch):
    pol, dists = prophet_pair()
    with pytest.raises(StateBudgetExceeded):
        exact_value(pol, dists, budget=2)
    monkeypatch.setenv("MB_STATE_BUDGET", "2")
    with pytest.raises(StateBudgetExceeded):
        exact_value(pol, dists)


def test_observe_modes():
    assert observe(3.0, 2.0, FeedbackMode.SEMI_BANDIT) == 3.0
    assert observe(3.0, 2.0, FeedbackMode.CENSORED) == 2.0
    assert observe(1.0, 2.0, FeedbackMode.CENSORED) == 1.0
    assert observe(2.0, 2.0, FeedbackMode.BINARY) == 1.0
    assert observe(1.0, 2.0, FeedbackMode.BINARY) == 0.0


def _enumerate(policy, dists):
    total = 0.0
    for combo in itertools.product(*[list(zip(d.support, d.probs)) for d in dists]):
        pr = math.prod(p for _, p in combo)
        if pr > 0.0:
            total += pr * execute(policy, [v for v, _ in combo]).payoff
    return total


@pytest.mark.parametrize("kind", KINDS)
def test_exact_value_matches_enumeration(kind):
    rng = np.random.default_rng(11)
    for _ in range(40):
        prob, dist = random_instance(kind, rng)
        pol = prob.solve(dist)
        assert exact_value(pol, dist) == pytest.approx(_enumerate(pol, dist), abs=1e-12)
        for i in range(prob.n):
            explore = prob.explore_policy(i)
            assert exact_value(explore, dist) == pytest.approx(_enumerate(explore, dist), abs=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_feedback_containment_and_probe_sums(kind):
    rng = np.random.default_rng(12)
    for _ in range(40):
        prob, dist = random_instance(kind, rng)
        pol = prob.solve(dist)
        mode = prob.meta.feedback
        x = [float(rng.choice(d.support)) for d in dist]
        for item, level, obs in execute(pol, x).probed:
            if mode is FeedbackMode.SEMI_BANDIT:
                assert level is None and obs == x[item]
            else:
                cap = pol.supports[item][level - 1]
                if mode is FeedbackMode.CENSORED:
                    assert obs == min(x[item], cap)
                else:
                    assert obs in (0.0, 1.0) and obs == float(x[item] >= cap)
        value, q = value_and_probes(pol, dist)
        assert value == pytest.approx(exact_value(pol, dist), abs=1e-15)
        for i, qi in q.by_item.items():
            levels = [p for (j, _), p in q.by_level.items() if j == i]
            assert math.fsum(levels) == pytest.approx(qi, abs=1e-12)
            assert qi <= 1.0 + 1e-12
        first = pol.decide(pol.initial_state())
        if isinstance(first, Probe):
            assert q.item(first.item) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(KINDS), st.floats(0.0, 0.5))
def test_value_gap_bounded_by_probe_weighted_tv(seed, kind, shift):
    from monobandit.distributions import tv_distance
    from monobandit.harness.verify import random_dominating

    rng = np.random.default_rng(seed)
    prob, d = random_instance(kind, rng)
    e = [random_dominating(di, rng, shift) for di in d]
    pol = prob.solve(e)
    q = probe_probabilities(pol, d)
    bound = pol.f_max * sum(q.item(i) * tv_distance(d[i], e[i]) for i in range(prob.n))
    # per-level distances are at most the full TV, so this is the coarse form
    assert abs(exact_value(pol, d) - exact_value(pol, e)) <= bound + 1e-9


def test_solved_prophet_key_is_behavioral():
    a = solve_prophet([HALF, HALF])
    b = ThresholdPolicy((0.6, 0.0), ((0.0, 1.0), (0.0, 1.0)))
    assert a.key == b.key
    assert isinstance(a.decide(a.initial_state()), Probe)
