import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covertsig.belief import (
    Belief,
    BeliefDistribution,
    LikelihoodPair,
    bayes_update,
    chained_dist_mean,
    dist_step,
    estimated_belief,
    g_factor,
    likelihood_pair,
    merge_support,
    oracle_estimated_belief,
)
from covertsig.errors import ImpossibleObservationError, OracleHorizonError

from conftest import random_scenario

# hand-computed one-step values for the binary preset with u=0, a=1:
# prior 0.15, malicious likelihood row (0.45, 0.55), benign row (0.55, 0.45)
POST_Y1 = 0.1774193548387097
POST_Y0 = 0.12616822429906543
MEAN_AFTER = 0.1543563460958698
G_ONE_STEP = 1.0290423073057986


def _pmfs(rng, n):
    return rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))


def test_belief_range():
    assert Belief(0.5).malicious_mass == 0.5
    for bad in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            Belief(bad)


def test_likelihood_pair_validation():
    with pytest.raises(ValueError):
        LikelihoodPair(np.array([0.5, 0.4]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        LikelihoodPair(np.array([1.1, -0.1]), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        LikelihoodPair(np.array([1.0]), np.array([0.5, 0.5]))


def test_likelihood_pair_from_scenario(preset):
    lik = likelihood_pair(preset, 0, 1)
    assert np.allclose(lik.m, [0.45, 0.55])
    assert np.allclose(lik.b, [0.55, 0.45])
    same = likelihood_pair(preset, 0, 0)
    assert same.identical


def test_bayes_update_known_values(preset):
    lik = likelihood_pair(preset, 0, 1)
    prior = Belief(0.15)
    assert bayes_update(prior, 1, lik).malicious_mass == pytest.approx(POST_Y1, abs=1e-12)
    assert bayes_update(prior, 0, lik).malicious_mass == pytest.approx(POST_Y0, abs=1e-12)


def test_bayes_update_impossible_observation():
    lik = LikelihoodPair(np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    with pytest.raises(ImpossibleObservationError):
        bayes_update(Belief(0.3), 1, lik)


def test_distribution_validation():
    with pytest.raises(ValueError):
        BeliefDistribution(np.array([0.2, 0.4]), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        BeliefDistribution(np.array([0.2]), np.array([-1.0]))
    with pytest.raises(ValueError):
        BeliefDistribution(np.array([]), np.array([]))


def test_singleton_and_support():
    d = BeliefDistribution.singleton(0.15)
    assert estimated_belief(d) == 0.15
    [(b, w)] = d.support
    assert (b.malicious_mass, w) == (0.15, 1.0)


def test_dist_step_one_round(preset):
    d = BeliefDistribution.singleton(0.15)
    out = dist_step(d, likelihood_pair(preset, 0, 1), preset.merge_tolerance)
    assert sorted(out.masses) == pytest.approx([POST_Y0, POST_Y1], abs=1e-12)
    assert estimated_belief(out) == pytest.approx(MEAN_AFTER, abs=1e-12)


def test_dist_step_benign_action_is_identity(preset):
    d = BeliefDistribution.singleton(0.15)
    assert dist_step(d, likelihood_pair(preset, 1, 0), preset.merge_tolerance) is d


def test_merge_support_clusters_and_preserves_mean():
    pts = [(Belief(0.2), 0.25), (Belief(0.2 + 1e-12), 0.25), (Belief(0.7), 0.5)]
    before = sum(b.malicious_mass * w for b, w in pts)
    d = merge_support(pts, tol=1e-9)
    assert d.masses.size == 2
    assert estimated_belief(d) == pytest.approx(before, abs=1e-15)


def test_g_factor_known_value(preset):
    g = g_factor(likelihood_pair(preset, 0, 1), Belief(0.15))
    assert g == pytest.approx(G_ONE_STEP, abs=1e-12)
    # one-step mean growth of a point distribution equals the factor
    assert MEAN_AFTER == pytest.approx(G_ONE_STEP * 0.15, abs=1e-12)


def test_g_factor_identical_likelihoods_is_one():
    m = np.array([0.3, 0.3, 0.4])
    assert g_factor(LikelihoodPair(m, m), Belief(0.42)) == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
def test_g_factor_never_below_one(seed, pi):
    rng = np.random.default_rng(seed)
    m, b = _pmfs(rng, int(rng.integers(2, 6)))
    assert g_factor(LikelihoodPair(m, b), Belief(pi)) >= 1.0 - 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
def test_dist_step_mean_never_decreases(seed, pi):
    rng = np.random.default_rng(seed)
    m, b = _pmfs(rng, int(rng.integers(2, 6)))
    lik = LikelihoodPair(m, b)
    d = BeliefDistribution.singleton(pi)
    out = dist_step(d, lik, tol=1e-9)
    assert estimated_belief(out) >= pi - 1e-12
    assert math.isclose(out.weights.sum(), 1.0, abs_tol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_recursion_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    s = random_scenario(rng)
    k = int(rng.integers(1, 5))
    inputs = [int(i) for i in rng.integers(0, s.inputs_alphabet.size, size=k)]
    actions = [int(a) for a in rng.integers(0, s.actions_alphabet.size, size=k)]
    recursive = chained_dist_mean(s, actions, inputs)
    oracle = oracle_estimated_belief(s, actions, inputs)
    assert recursive == pytest.approx(oracle, abs=1e-12)


def test_oracle_refuses_long_horizons(preset):
    with pytest.raises(OracleHorizonError):
        oracle_estimated_belief(preset, [1] * 9, [0] * 9)
    with pytest.raises(ValueError):
        oracle_estimated_belief(preset, [1], [0, 0])
