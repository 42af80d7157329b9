"""Epoch arithmetic, block rounding, and guarded block execution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def nu(s: int, d: int, K: int) -> int:
    """Number of learning epochs a switching budget affords.

    ``floor((s - d - 1) / (K - 1))``, with non-positive arguments mapping
    to zero.
    """
    if K < 2:
        raise ValueError("nu requires at least two actions")
    raw = s - d - 1
    return 0 if raw <= 0 else raw // (K - 1)


def epoch_grid(T: int, K: int, nu_val: int) -> list[int]:
    """Epoch end targets t_0 = 0 <= t_1 <= ... <= t_{nu+1} = T.

    ``t_l = floor(K^(1-e_l) T^(e_l))`` with exponent
    ``e_l = (2 - 2^-(l-1)) / (2 - 2^-nu)``; the final exponent is exactly 1.
    """
    if nu_val < 0:
        raise ValueError("nu must be nonnegative")
    denom = 2.0 - 2.0 ** (-nu_val)
    grid = [0]
    for l in range(1, nu_val + 2):
        e = (2.0 - 2.0 ** (-(l - 1))) / denom
        t = math.floor(K ** (1.0 - e) * float(T) ** e)
        grid.append(max(grid[-1], min(int(t), int(T))))
    return grid


def round_lengths(lengths: np.ndarray) -> np.ndarray:
    """Round fractional block lengths to integers without exceeding the sum.

    Floors every block, then hands the leftover periods one at a time to the
    blocks with the largest fractional remainders (ties by lower index).
    """
    lengths = np.asarray(lengths, dtype=float)
    floors = np.floor(lengths).astype(np.int64)
    total = int(math.floor(float(lengths.sum()) + 1e-9))
    leftover = total - int(floors.sum())
    if leftover > 0:
        frac = lengths - floors
        order = np.argsort(-frac, kind="stable")
        floors[order[:leftover]] += 1
    return floors


def order_blocks(lengths: np.ndarray, prev_action: int | None) -> list[tuple[int, int]]:
    """Arrange integer block lengths into a play order.

    The previously played action goes first whenever its allocation is
    positive (so the epoch boundary costs no switch); all other blocks follow
    in ascending action order.
    """
    positive = [int(k) for k in np.flatnonzero(lengths > 0)]
    if prev_action is not None and prev_action in positive:
        positive.remove(prev_action)
        positive.insert(0, prev_action)
    return [(k, int(lengths[k])) for k in positive]


@dataclass
class EpochPlan:
    """One epoch's schedule: allocations and the rounded block order."""

    epoch: int
    allocations: np.ndarray          # N_k before the gamma discount
    blocks: list[tuple[int, int]]    # (action, periods), in play order
    gamma: float


def play_blocks(env, blocks, budget: int | None = None, observe=None) -> bool:
    """Execute blocks against the environment under a hard switch budget.

    If the next block would require a switch beyond ``budget``, the remaining
    schedule degrades to repeating the last action (never raising), and the
    attempt is reported by returning True.  ``observe(k, played, *stats)`` is
    called after each block with the environment's block statistics.
    """
    tripped = False
    i = 0
    while i < len(blocks) and not env.stopped:
        k, m = blocks[i]
        i += 1
        if m <= 0:
            continue
        last = env.state.last_action
        if (
            budget is not None
            and last is not None
            and k != last
            and env.state.switches_used >= budget
        ):
            tripped = True
            m += sum(mm for _, mm in blocks[i:])
            k = last
            i = len(blocks)
        m = min(m, env.T - env.state.t)
        if m <= 0:
            break
        stats = env.run_block(k, m)
        if observe is not None:
            observe(k, stats)
    return tripped


def play_until_horizon(env, fallback: int = 0) -> None:
    """Fill any trailing periods by repeating the last action (no switch)."""
    if env.stopped:
        return
    k = env.state.last_action
    if k is None:
        k = fallback
    left = env.T - env.state.t
    if left > 0:
        env.run_block(k, left)
