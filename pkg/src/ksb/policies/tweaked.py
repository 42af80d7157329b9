"""Clairvoyant static policy: a discounted vertex optimum played in blocks.

With known means the deterministic LP is solved once; each supported action
is played for a gamma-discounted fraction of its LP allocation in one
consecutive block, and the final block runs to the horizon.  The discount
leaves enough inventory headroom that, with high probability, the trajectory
never stops early.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..envs import BnrmInstance, make_env, make_rng_pair
from ..lp import build_dlp, build_dlp_g, solve_packing
from .scheduling import EpochPlan, play_blocks, play_until_horizon


class GammaClamped(UserWarning):
    """The discount formula fell below zero and was clamped."""


def tweaked_gamma(inst, gamma_mode: str, gamma_value: float = 1.0) -> float:
    """Discount factor: fixed, or the inventory-protection formula."""
    if gamma_mode == "fixed":
        return float(gamma_value)
    if gamma_mode != "formula":
        raise ValueError(f"unknown gamma_mode {gamma_mode!r}")
    problem = inst.problem
    T = problem.T
    if isinstance(inst, BnrmInstance):
        gamma = 1.0 - 2.0 * problem.a_max / problem.B_min * math.sqrt(
            problem.n * T * math.log(T)
        )
    else:
        gamma = 1.0 - 2.0 * problem.C_max / problem.B_min * math.sqrt(
            T * math.log(T)
        )
    if gamma < 0.0:
        warnings.warn(
            f"discount formula gave {gamma:.4f}; clamped to 0", GammaClamped
        )
        gamma = 0.0
    return min(1.0, gamma)


def tweaked_lp_plan(inst, gamma_mode: str = "fixed", gamma_value: float = 1.0):
    """Block schedule from the true-means LP vertex optimum.

    Supported actions are ordered by index; every block except the last runs
    for ``floor(gamma * x_k)`` periods and the last absorbs the remaining
    horizon.  The plan makes ``len(support) - 1`` switches.
    """
    problem = inst.problem
    if isinstance(inst, BnrmInstance):
        prog = build_dlp(problem, inst.true_means())
    else:
        prog = build_dlp_g(problem, inst.reward_means(), inst.cost_means())
    sol = solve_packing(prog)
    gamma = tweaked_gamma(inst, gamma_mode, gamma_value)

    support = list(sol.support)
    blocks: list[tuple[int, int]] = []
    if support:
        used = 0
        for k in support[:-1]:
            m = int(math.floor(gamma * sol.x[k] + 1e-9))  # tolerate pivot fuzz
            blocks.append((k, m))
            used += m
        blocks.append((support[-1], problem.T - used))
    allocations = np.zeros(problem.K)
    allocations[list(sol.support)] = sol.x[list(sol.support)]
    return EpochPlan(epoch=1, allocations=allocations, blocks=blocks, gamma=gamma)


def run_tweaked_lp(spec, inst, seed):
    """Execute the static plan; switch count is capped at its block count - 1."""
    env_rng, _, pair = make_rng_pair(seed)
    env = make_env(inst, env_rng, spec.stockout)
    plan = tweaked_lp_plan(inst, spec.gamma_mode, spec.gamma_value)
    budget = max(len([b for b in plan.blocks if b[1] > 0]) - 1, 0)
    tripped = play_blocks(env, plan.blocks, budget=budget)
    play_until_horizon(env)
    return env.record(pair, guard_tripped=tripped)
