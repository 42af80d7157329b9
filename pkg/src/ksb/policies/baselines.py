"""Literature baselines: explore-then-exploit, Thompson sampling, primal-dual.

All three operate on price-based instances.  The explore-then-exploit policy
plays uniform exploration blocks and then a vertex optimum of the empirical
deterministic LP, continuing the last exploration action first so the phase
change costs no switch.  The Thompson policy resolves the LP every period at
posterior-sampled demand and randomizes over actions proportionally to the
solution.  The primal-dual policy scores actions by an optimistic
bang-per-buck ratio against multiplicatively updated resource duals.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from ..envs import BnrmInstance, make_env, make_rng_pair
from ..lp import build_dlp, solve_packing
from .confidence import ConfidenceState
from .scheduling import order_blocks, play_blocks, play_until_horizon, round_lengths


def _require_price_based(inst, name):
    if not isinstance(inst, BnrmInstance):
        raise TypeError(f"{name} is defined for price-based instances only")


def run_explore_then_exploit(spec, inst, seed):
    """Uniform exploration for ~theta K^(1/3) T^(2/3) periods, then exploit.

    Every action is visited at least once regardless of theta.  Structurally
    makes at most (K - 1) + (d + 1) switches.
    """
    _require_price_based(inst, "explore-then-exploit")
    env_rng, _, pair = make_rng_pair(seed)
    env = make_env(inst, env_rng, spec.stockout)
    problem = inst.problem
    K, T = problem.K, problem.T

    explore_total = int(math.floor(spec.theta * K ** (1.0 / 3.0) * T ** (2.0 / 3.0)))
    explore_total = min(max(explore_total, K), T)
    conf = ConfidenceState(problem)
    blocks = order_blocks(
        round_lengths(np.full(K, explore_total / K)), prev_action=None
    )
    play_blocks(
        env, blocks, observe=lambda k, stats: conf.observe(k, stats[1], stats[0])
    )

    if not env.stopped:
        explored = env.state.t
        if spec.update_inventory:
            view = dataclasses.replace(
                problem,
                T=T - explored,
                B=np.maximum(problem.B - env.state.consumed, 0.0),
            )
            scale = 1.0
        else:
            view = problem
            scale = (T - explored) / T
        prog = build_dlp(view, conf.qbar())
        for k in np.flatnonzero(~conf.visited):
            prog = prog.with_pinned(int(k))
        sol = solve_packing(prog)
        lengths = round_lengths(scale * sol.x)
        play_blocks(env, order_blocks(lengths, env.state.last_action))
        play_until_horizon(env)
    return env.record(pair)


def run_thompson(spec, inst, seed):
    """Per-period posterior sampling with an LP-proportional action draw.

    Demand posteriors are independent Beta distributions per (product,
    action), starting from the prior in ``spec.prior``.  Each period the
    deterministic LP is solved at a posterior sample and action k is played
    with probability x_k / T; leftover probability mass goes to the action
    with the largest allocation.
    """
    _require_price_based(inst, "Thompson sampling")
    env_rng, pol_rng, pair = make_rng_pair(seed)
    env = make_env(inst, env_rng, spec.stockout)
    problem = inst.problem
    K, T = problem.K, problem.T
    a0, b0 = spec.prior

    succ = np.zeros((problem.n, K))
    count = np.zeros((problem.n, K))
    while not env.stopped:
        q_sample = pol_rng.beta(a0 + succ, b0 + count - succ)
        if spec.update_inventory:
            view = dataclasses.replace(
                problem,
                T=T - env.state.t,
                B=np.maximum(problem.B - env.state.consumed, 0.0),
            )
        else:
            view = problem
        sol = solve_packing(build_dlp(view, q_sample))
        probs = np.maximum(sol.x / view.T, 0.0)
        probs[int(np.argmax(sol.x))] += max(0.0, 1.0 - probs.sum())
        probs /= probs.sum()
        k = int(pol_rng.choice(K, p=probs))
        demand, _, _ = env.step(k)
        succ[:, k] += demand
        count[:, k] += 1.0
    return env.record(pair)


def run_primal_dual(spec, inst, seed):
    """Bang-per-buck play against exponentiated resource duals.

    Scores each action by optimistic reward over dual-weighted pessimistic
    cost; a near-zero denominator scores +inf, reproducing the known
    instability on actions whose estimated consumption is tiny.
    """
    _require_price_based(inst, "primal-dual")
    env_rng, _, pair = make_rng_pair(seed)
    env = make_env(inst, env_rng, spec.stockout)
    problem = inst.problem
    K, d, T = problem.K, problem.d, problem.T

    eps = spec.eps
    if eps is None:
        eps = math.sqrt(math.log(d + 1) / problem.B_min) if d else 0.0
    cost_scale = max(problem.n * problem.a_max, 1e-12)
    p_norm = np.linalg.norm(problem.p, axis=0)
    a_norm = np.linalg.norm(problem.A, axis=1)
    log_term = math.log((d + 1) * K * T)

    n_k = np.zeros(K)
    rev_sum = np.zeros(K)
    cost_sum = np.zeros((d, K))
    weights = np.ones(d)
    denom_floor = 1e-12

    while not env.stopped:
        with np.errstate(divide="ignore", invalid="ignore"):
            rad = np.where(n_k > 0, np.sqrt(log_term / np.maximum(n_k, 1)), np.inf)
            ucb = np.where(n_k > 0, rev_sum / np.maximum(n_k, 1) + p_norm * rad, np.inf)
            lcb = np.maximum(
                cost_sum / np.maximum(n_k, 1) - a_norm[:, None] * rad, 0.0
            )
            lcb[:, n_k == 0] = 0.0
        if d == 0:
            ratio = ucb
        else:
            duals = weights / weights.sum()
            denom = duals @ lcb
            with np.errstate(divide="ignore"):
                ratio = np.where(denom > denom_floor, ucb / denom, np.inf)
        k = int(np.argmax(ratio))  # ties resolve to the lowest index
        demand, _, _ = env.step(k)
        cons = problem.A @ demand
        n_k[k] += 1
        rev_sum[k] += float(problem.p[:, k] @ demand)
        cost_sum[:, k] += cons
        if d:
            weights *= (1.0 + eps) ** (cons / cost_scale)
    return env.record(pair)
