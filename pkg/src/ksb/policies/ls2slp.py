"""Limited-switch learning via two-stage linear programming.

Each learning epoch solves a pessimistic program (lower reward bands in the
objective, upper cost bands in the resource rows) to set a revenue floor,
then one optimistic exploration program per action that pushes that action as
far as the floor and the optimistic resource rows allow.  The balanced
average of the exploration solutions, scaled to the epoch length, becomes a
schedule of consecutive blocks.  The final epoch exploits a vertex optimum of
the empirical deterministic LP, so its support stays within d + 1 actions.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from ..envs import BnrmInstance, make_env, make_rng_pair
from ..lp import (
    ROW_FLOOR,
    ROW_RESOURCE,
    ROW_TIME,
    Infeasible,
    PackingProgram,
    Row,
    build_dlp,
    build_dlp_g,
    solve_packing,
)
from .confidence import BwkConfidenceState, ConfidenceState
from .scheduling import (
    EpochPlan,
    epoch_grid,
    nu,
    order_blocks,
    play_blocks,
    play_until_horizon,
    round_lengths,
)

# Relative slack applied to the revenue-floor rhs so that the pessimistic
# optimum itself never fails the floor through float roundoff.
_FLOOR_SLACK = 1e-9


def ls_gamma(spec, problem, t1: int, price_based: bool) -> float:
    """Discount factor for the block lengths, clamped to [0, 1]."""
    if spec.gamma_mode == "fixed":
        return float(spec.gamma_value)
    if spec.gamma_mode != "formula":
        raise ValueError(f"unknown gamma_mode {spec.gamma_mode!r}")
    T, d = problem.T, problem.d
    K = problem.K
    log_term = math.log(max(d * K * T, 2))
    if price_based:
        coef = 3.0 * problem.a_max * math.sqrt(d * problem.n * log_term)
    else:
        coef = 3.0 * problem.C_max * math.sqrt(d * log_term)
    gamma = 1.0 - coef * math.log(T) / problem.B_min * t1
    return min(1.0, max(0.0, gamma))


def pessimistic_program(conf, B: np.ndarray, T: float) -> PackingProgram:
    """First-stage program: maximize lower-band revenue under upper-band costs."""
    rows = [Row(conf.U_cost[i].copy(), B[i], ROW_RESOURCE) for i in range(len(B))]
    rows.append(Row(np.ones(len(conf.L_rew)), T, ROW_TIME))
    return PackingProgram(conf.L_rew.copy(), rows)


def exploration_program(conf, j: int, floor: float, B: np.ndarray, T: float):
    """Second-stage program: maximize x_j keeping optimistic revenue above the floor.

    The floor row is included only when it can bind: a strictly positive
    floor with finite optimistic rewards.  An unexplored action has unbounded
    optimistic revenue, so the floor can be met with an arbitrarily small
    amount of it and the row is vacuous.
    """
    K = len(conf.U_rew)
    obj = np.zeros(K)
    obj[j] = 1.0
    rows = []
    if floor > 1e-12 and np.all(np.isfinite(conf.U_rew)):
        rows.append(
            Row(conf.U_rew.copy(), floor - _FLOOR_SLACK * max(1.0, floor), ROW_FLOOR)
        )
    rows.extend(Row(conf.L_cost[i].copy(), B[i], ROW_RESOURCE) for i in range(len(B)))
    rows.append(Row(np.ones(K), T, ROW_TIME))
    return PackingProgram(obj, rows)


def empirical_dlp(conf, problem, B: np.ndarray, T: float) -> PackingProgram:
    """Deterministic LP at the empirical means; unvisited actions are pinned."""
    view = dataclasses.replace(problem, T=T, B=B)
    if isinstance(conf, ConfidenceState):
        prog = build_dlp(view, conf.qbar())
    else:
        prog = build_dlp_g(view, conf.rbar(), conf.cbar())
    for k in np.flatnonzero(~conf.visited):
        prog = prog.with_pinned(int(k))
    return prog


def ls2slp_epoch(
    conf, problem, l: int, grid, gamma: float, prev_action=None, trace=None
) -> EpochPlan:
    """Plan exploration epoch ``l`` from the current confidence state.

    ``problem`` carries the budgets the epoch may use (already re-based for
    the inventory-updating variant); ``grid`` supplies the epoch length
    ``t_l - t_{l-1}`` and the averaging denominator is ``problem.T``.
    """
    K = problem.K
    pes = pessimistic_program(conf, problem.B, problem.T)
    sol_pes = solve_packing(pes)
    xs = np.empty((K, K))
    progs = []
    for j in range(K):
        prog_j = exploration_program(conf, j, sol_pes.value, problem.B, problem.T)
        progs.append(prog_j)
        try:
            xs[j] = solve_packing(prog_j).x
        except Infeasible:
            # off the clean event the bands can invert; fall back to the
            # plausible pessimistic mix rather than aborting the run
            xs[j] = sol_pes.x
    allocations = (grid[l] - grid[l - 1]) / problem.T * xs.mean(axis=0)
    blocks = order_blocks(round_lengths(gamma * allocations), prev_action)
    if trace is not None:
        trace.append(
            {
                "epoch": l,
                "bands": conf.snapshot(),
                "j_pes": sol_pes.value,
                "exploration_programs": progs,
                "exploration_solutions": xs.copy(),
                "allocations": allocations.copy(),
            }
        )
    return EpochPlan(epoch=l, allocations=allocations, blocks=blocks, gamma=gamma)


def ls2slp_last_epoch(
    conf, problem, grid, gamma: float, prev_action=None, scale: float | None = None
) -> EpochPlan:
    """Plan the pure-exploitation epoch from the empirical deterministic LP."""
    sol = solve_packing(empirical_dlp(conf, problem, problem.B, problem.T))
    if scale is None:
        scale = (problem.T - grid[-2]) / problem.T
    allocations = scale * sol.x
    blocks = order_blocks(round_lengths(gamma * allocations), prev_action)
    return EpochPlan(
        epoch=len(grid) - 1, allocations=allocations, blocks=blocks, gamma=gamma
    )


def run_ls2slp(spec, inst, seed, trace=None):
    """Run one limited-switch trajectory; returns the RunRecord.

    ``trace``, when a list, receives one entry per exploration epoch with the
    band snapshot and the logged programs (used by the verification suite).
    """
    env_rng, pol_rng, pair = make_rng_pair(seed)
    env = make_env(inst, env_rng, spec.stockout)
    problem = inst.problem
    price_based = isinstance(inst, BnrmInstance)
    T, d, K = problem.T, problem.d, problem.K

    if K == 1:
        play_until_horizon(env)
        return env.record(pair)

    nu_val = nu(spec.s, d, K)
    grid = epoch_grid(T, K, nu_val)
    gamma = ls_gamma(spec, problem, grid[1], price_based)
    conf = ConfidenceState(problem) if price_based else BwkConfidenceState(problem)
    prev = int(pol_rng.integers(K))
    tripped = False

    def observe(k, stats):
        if price_based:
            demand_sum, played = stats[0], stats[1]
            conf.observe(k, played, demand_sum)
        else:
            reward_sum, cost_sum, played = stats[0], stats[1], stats[2]
            conf.observe(k, played, reward_sum, cost_sum)

    for l in range(1, nu_val + 1):
        if env.stopped:
            break
        if l >= 2:
            conf.update_bands()
        epoch_start = env.state.t
        view = _epoch_view(problem, env, epoch_start, spec.update_inventory)
        plan = ls2slp_epoch(conf, view, l, grid, gamma, prev, trace)
        tripped |= play_blocks(env, plan.blocks, budget=spec.s, observe=observe)
        if trace is not None and trace and trace[-1].get("epoch") == l:
            trace[-1]["epoch_start"] = epoch_start
            trace[-1]["epoch_end"] = env.state.t
            trace[-1]["epoch_target"] = grid[l]
        if env.state.last_action is not None:
            prev = env.state.last_action

    if not env.stopped:
        conf.update_bands()  # diagnostic refresh; exploitation reads means only
        epoch_start = env.state.t
        view = _epoch_view(problem, env, epoch_start, spec.update_inventory)
        scale = 1.0 if spec.update_inventory else (T - grid[nu_val]) / T
        plan = ls2slp_last_epoch(conf, view, grid, gamma, prev, scale=scale)
        tripped |= play_blocks(env, plan.blocks, budget=spec.s, observe=observe)
        play_until_horizon(env, fallback=prev)

    return env.record(pair, guard_tripped=tripped)


def _epoch_view(problem, env, epoch_start: int, update: bool):
    """Problem view an epoch plans against; re-based when updating inventory."""
    if not update:
        return problem
    return dataclasses.replace(
        problem,
        T=problem.T - epoch_start,
        B=np.maximum(problem.B - env.state.consumed, 0.0),
    )
