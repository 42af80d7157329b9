"""Remaining worked examples: Monte-Carlo frequencies, switch-count windows,
expected-consumption arithmetic, and the last-epoch support bound."""

import numpy as np
import pytest

from ksb.bench import make_instance
from ksb.envs import BwkEnv, BwkInstance, BwkProblem, make_rng_pair
from ksb.lp import build_dlp, solve_packing
from ksb.policies import ConfidenceState, PolicySpec, ls2slp_last_epoch, run_policy, tweaked_lp_plan


def test_bwk_reward_frequency_matches_means():
    m = 200_000
    problem = BwkProblem(T=m, B=[1e12], K=2, R_max=2.0, C_max=1.0)
    inst = BwkInstance(
        problem, r_prob=[0.3, 0.7], c_prob=[[0.4, 0.1]], r_scale=[2.0, 1.0]
    )
    env_rng, _, _ = make_rng_pair(18)
    env = BwkEnv(inst, env_rng)
    reward_sum, cost_sum, played, _, _ = env.run_block(0, m)
    assert played == m
    se_r = 2.0 * np.sqrt(0.3 * 0.7 / m)
    assert abs(reward_sum / m - 0.6) <= 3 * se_r
    se_c = np.sqrt(0.4 * 0.6 / m)
    assert abs(cost_sum[0] / m - 0.4) <= 3 * se_c


def test_explore_exploit_switch_window_small_horizon():
    inst = make_instance("linear", "small", 1000)
    sw = [run_policy(PolicySpec("BZ12"), inst, seed).switches for seed in range(100)]
    assert 3.6 <= np.mean(sw) <= 5.8


def test_limited_switch_small_budget_window_small_horizon():
    inst = make_instance("linear", "small", 1000)
    spec = PolicySpec("LS2SLP", s=8)
    sw = [run_policy(spec, inst, seed).switches for seed in range(100)]
    assert 3.7 <= np.mean(sw) <= 5.7


def test_thompson_switch_window_small_horizon():
    inst = make_instance("linear", "small", 1000)
    sw = [run_policy(PolicySpec("FSW18"), inst, seed).switches for seed in range(10)]
    assert 250 <= np.mean(sw) <= 600


@pytest.mark.slow
def test_thompson_switch_count_long_horizon():
    inst = make_instance("linear", "small", 10000)
    sw = [run_policy(PolicySpec("FSW18"), inst, seed).switches for seed in range(3)]
    assert np.mean(sw) >= 2000


def test_static_plan_expected_consumption_within_budget():
    # formula discount clamps to 0 at this scale; with a fixed discount of 1
    # the planned blocks consume at most each budget in expectation
    inst = make_instance("linear", "large", 10000)
    plan = tweaked_lp_plan(inst, "fixed", 1.0)
    q = inst.true_means()
    cost_rate = inst.problem.A @ q  # (d, K)
    expected = np.zeros(inst.problem.d)
    for k, m in plan.blocks:
        expected += cost_rate[:, k] * m
    assert np.all(expected <= inst.problem.B + 1e-6 * inst.problem.T)


def test_last_epoch_support_bound_over_random_histories():
    rng = np.random.default_rng(11)
    for model in ("linear", "exponential"):
        inst = make_instance(model, "small", 1000)
        problem = inst.problem
        q = inst.true_means()
        for _ in range(25):
            conf = ConfidenceState(problem)
            for k in range(problem.K):
                m = int(rng.integers(5, 80))
                draws = rng.random((m, problem.n)) < q[:, k]
                conf.observe(k, m, draws.sum(axis=0).astype(float))
            plan = ls2slp_last_epoch(conf, problem, [0, 170, 1000], 1.0)
            assert len([b for b in plan.blocks if b[1] > 0]) <= problem.d + 1
