import math

import numpy as np
import pytest
from scipy import stats

from ecoslice.agents import (AllActiveAgent, DcmabAgent, MinMaxScaler, RandomAgent, ThompsonCAgent,
                             ThompsonNcAgent, chol_rank1_update, make_agent, one_hot_contexts,
                             AGENT_NAMES)
from ecoslice.env import Observation
from ecoslice.neural import MlpModel

OBS = Observation(0, 1500.0, 1.0)


def chi2_uniform_ok(actions, k):
    counts = np.bincount(actions, minlength=k)
    return stats.chisquare(counts).pvalue > 0.001


def run_stationary(agent, means, steps=1000, noise=0.05, seed=0):
    rng = np.random.default_rng(seed)
    regret = 0.0
    for t in range(steps):
        obs = Observation(0, 1000.0, 1.0)
        a = agent.select(obs)
        agent.update(obs, a, means[a] + noise * rng.standard_normal())
        regret += means.max() - means[a]
    return regret


MEANS = np.array([0.1, 0.5, 0.2, 0.9, 0.0, 0.3, 0.6, 0.4])


def test_all_active_and_random():
    assert all(AllActiveAgent(8).select(OBS) == 7 for _ in range(10))
    r1, r2 = RandomAgent(8, seed=3), RandomAgent(8, seed=3)
    assert [r1.select(OBS) for _ in range(50)] == [r2.select(OBS) for _ in range(50)]
    r = RandomAgent(8, seed=1)
    assert chi2_uniform_ok([r.select(OBS) for _ in range(10_000)], 8)


def test_dcmab_full_exploration_uniform():
    ag = DcmabAgent(8, epsilon=1.0, seed=0)
    assert chi2_uniform_ok([ag.select(OBS) for _ in range(10_000)], 8)


def test_dcmab_zero_model_tie_break():
    ag = DcmabAgent(8, epsilon=0.0, seed=0)
    ag.model = MlpModel([2, 100, 100, 100, 8], zero=True)
    assert ag.select(OBS) == 0


def test_dcmab_learns_best_arm():
    ag = DcmabAgent(8, state_mode="sadi", sadis_per_day=1, epsilon=0.1, init_output=1.0, seed=0)
    run_stationary(ag, MEANS)
    ag.freeze()
    assert ag.select(OBS) == 3


def test_dcmab_argmax_shift_invariant():
    ag = DcmabAgent(8, epsilon=0.0, seed=4)
    a0 = ag.select(OBS)
    ag.model.biases[-1] += 12.5
    assert ag.select(OBS) == a0


def test_dcmab_loss_trend_decreases():
    ag = DcmabAgent(8, state_mode="sadi", sadis_per_day=1, epsilon=0.1, seed=2)
    rng = np.random.default_rng(0)
    losses = []
    for _ in range(1000):
        a = ag.select(OBS)
        losses.append(ag.update(OBS, a, MEANS[a] + 0.05 * rng.standard_normal()))
    losses = np.array(losses)
    assert losses[-100:].mean() < losses[:100].mean()


def test_dcmab_eq_state_in_unit_box():
    ag = DcmabAgent(8, seed=0)
    rng = np.random.default_rng(1)
    for _ in range(50):
        x = ag.encode(Observation(0, float(rng.uniform(900, 1800)), float(rng.uniform(0.5, 1))))
        assert np.all((x >= 0) & (x <= 1))
    sc = MinMaxScaler(2)
    sc.observe(np.array([1.0, 2.0]))
    np.testing.assert_array_equal(sc.transform(np.array([1.0, 2.0])), [0.0, 0.0])


def test_dcmab_update_zero_loss_at_prediction():
    ag = DcmabAgent(8, seed=0)
    pred = ag.model.forward(ag.encode(OBS))
    assert ag.update(OBS, 2, float(pred[2])) == 0.0


def test_thompson_sigma_formula_and_prior_variance():
    z, ctx = one_hot_contexts(8, 144)
    ag = ThompsonCAgent(8, 144, contexts=(z, ctx), seed=0)
    sigma = 0.01 * math.sqrt(9 * 1152 * math.log(1000 / 0.5))
    assert ag.sigma == pytest.approx(sigma, rel=1e-12)
    samples = np.array([ag.sample_mu() for _ in range(10_000)])
    assert abs(samples.var(axis=0).mean() / sigma ** 2 - 1) < 0.05


def test_thompson_sigma_zero_is_deterministic():
    ag = ThompsonCAgent(8, 144, M=0.0, contexts=one_hot_contexts(8, 144), seed=0)
    np.testing.assert_array_equal(ag.sample_mu(), ag.mu_hat)
    assert len({ag.select(OBS) for _ in range(20)}) == 1


def test_thompson_one_hot_single_update():
    z, ctx = one_hot_contexts(8, 144)
    ag = ThompsonCAgent(8, 144, contexts=(z, ctx), seed=0)
    obs = Observation(5, 0.0, 0.0)
    ag.update(obs, 3, 0.8)
    j = 3 * 144 + 5
    D = ag.D
    assert D[j, j] == pytest.approx(2.0)
    off = D - np.diag(np.diag(D))
    assert np.abs(off).max() == 0
    assert ag.mu_hat[j] == pytest.approx(0.4)
    assert np.count_nonzero(ag.mu_hat) == 1


def test_thompson_one_hot_cell_mean():
    z, ctx = one_hot_contexts(4, 6)
    ag = ThompsonCAgent(4, 6, contexts=(z, ctx), seed=1)
    rng = np.random.default_rng(0)
    log = {}
    for t in range(300):
        obs = Observation(t % 6, 0.0, 0.0)
        a = ag.select(obs)
        r = float(rng.normal())
        ag.update(obs, a, r)
        log.setdefault((a, t % 6), []).append(r)
    for (a, s), rs in log.items():
        assert ag.mu_hat[a * 6 + s] == pytest.approx(sum(rs) / (1 + len(rs)), abs=1e-10)


@pytest.mark.parametrize("context", ["one_hot", "arm_slot"])
def test_thompson_matches_batch_ridge(context):
    K, N = 8, 12
    kwargs = {"contexts": one_hot_contexts(K, N)} if context == "one_hot" else {}
    ag = ThompsonCAgent(K, N, seed=5, **kwargs)
    rng = np.random.default_rng(2)
    ds, rs = [], []
    for t in range(200):
        obs = Observation(t % N, 0.0, 0.0)
        a = ag.select(obs)
        r = float(rng.normal(1.0, 0.5))
        ds.append(ag.contexts(obs.sadi_of_day)[a])
        rs.append(r)
        ag.update(obs, a, r)
    X, y = np.array(ds), np.array(rs)
    batch = np.linalg.solve(np.eye(ag.z) + X.T @ X, X.T @ y)
    assert np.abs(ag.mu_hat - batch).max() <= 1e-8
    w = np.linalg.eigvalsh(ag.D)
    assert w.min() >= 1 - 1e-9
    np.testing.assert_allclose(ag.D, ag.D.T)


def test_thompson_zero_reward_keeps_zero_mean():
    ag = ThompsonCAgent(8, 10, seed=0)
    for t in range(50):
        obs = Observation(t % 10, 0.0, 0.0)
        ag.update(obs, ag.select(obs), 0.0)
    assert not ag.mu_hat.any()


def test_literal_update_keeps_only_last_observation():
    z, ctx = one_hot_contexts(2, 1)
    ag = ThompsonCAgent(2, 1, contexts=(z, ctx), literal_update=True, seed=0)
    ag.update(OBS, 0, 1.0)
    ag.update(OBS, 0, 1.0)
    assert ag.mu_hat[0] == pytest.approx(1 / 3)


def test_chol_rank1_update():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(6, 6))
    S = A @ A.T + np.eye(6)
    L = np.linalg.cholesky(S)
    x = rng.normal(size=6)
    x[2] = 0.0
    chol_rank1_update(L, x)
    np.testing.assert_allclose(L @ L.T, S + np.outer(x, x), atol=1e-12)


def test_nc_uniform_start_and_counts():
    picks = [ThompsonNcAgent(8, seed=s).select(OBS) for s in range(10_000)]
    assert chi2_uniform_ok(picks, 8)
    ag = ThompsonNcAgent(8, seed=0)
    means = np.zeros(8)
    means[5] = 1.0
    for _ in range(1000):
        a = ag.select(OBS)
        ag.update(OBS, a, means[a])
    assert ag.counts.sum() == 1000
    assert ag.counts[5] / 1000 > 0.9


@pytest.mark.parametrize("name", ["Thompson-C", "Thompson-NC", "DCMAB-SADI"])
def test_stationary_bandit_beats_random(name):
    params = {"init_output": 1.0} if name.startswith("DCMAB") else {}
    ag = make_agent(name, 8, 1, seed=0, **params)
    rand = run_stationary(RandomAgent(8, seed=0), MEANS)
    assert run_stationary(ag, MEANS) < rand / 2


@pytest.mark.parametrize("name", AGENT_NAMES)
def test_replay_determinism(name):
    def actions():
        ag = make_agent(name, 8, 144, seed=11)
        out = []
        for t in range(300):
            obs = Observation(t % 144, 1000.0 + t, 1.0 - t / 1000)
            a = ag.select(obs)
            ag.update(obs, a, MEANS[a] + 0.01 * (t % 7))
            out.append(a)
        return out
    assert actions() == actions()


def test_make_agent_unknown():
    with pytest.raises(ValueError):
        make_agent("Greedy", 8, 144)
