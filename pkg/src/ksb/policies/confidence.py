"""Visit counts, empirical means, and monotone confidence bands.

Bands are refreshed only at epoch boundaries and are intersected with their
previous values, so each [L, U] interval can only shrink over time.  Before a
first observation of an action the upper bands hold the +inf sentinel and the
lower bands hold zero.
"""

from __future__ import annotations

import math

import numpy as np


class ConfidenceState:
    """Demand statistics for a price-based problem.

    Attributes:
        n_k: periods each action has been played.
        demand_sum: accumulated demand per (product, action).
        U_rew / L_rew: per-action revenue bands.
        U_cost / L_cost: per-(resource, action) consumption bands.
    """

    def __init__(self, problem):
        K, n, d = problem.K, problem.n, problem.d
        self.problem = problem
        self.n_k = np.zeros(K, dtype=np.int64)
        self.demand_sum = np.zeros((n, K))
        self.U_rew = np.full(K, np.inf)
        self.L_rew = np.zeros(K)
        self.U_cost = np.full((d, K), np.inf)
        self.L_cost = np.zeros((d, K))
        self._log_term = math.log((d + 1) * K * problem.T)
        self._p_norm = np.linalg.norm(problem.p, axis=0)  # ||p_k||_2
        self._a_norm = np.linalg.norm(problem.A, axis=1)  # ||A_i||_2

    def observe(self, k: int, periods: int, demand_sum: np.ndarray) -> None:
        self.n_k[k] += periods
        self.demand_sum[:, k] += demand_sum

    @property
    def visited(self) -> np.ndarray:
        return self.n_k > 0

    def qbar(self) -> np.ndarray:
        """Empirical mean demand; zero for actions never played."""
        denom = np.maximum(self.n_k, 1)
        return self.demand_sum / denom

    def radius(self) -> np.ndarray:
        """Hoeffding-style radius sqrt(log[(d+1)KT] / n_k); +inf if unvisited."""
        with np.errstate(divide="ignore"):
            return np.where(
                self.visited, np.sqrt(self._log_term / np.maximum(self.n_k, 1)), np.inf
            )

    def update_bands(self) -> None:
        """Intersect the bands with the current empirical estimates."""
        vis = self.visited
        if not vis.any():
            return
        qbar = self.qbar()
        r = self.radius()
        rev_hat = np.einsum("jk,jk->k", self.problem.p, qbar)
        rad_rev = self._p_norm * r
        self.U_rew[vis] = np.minimum(self.U_rew, rev_hat + rad_rev)[vis]
        self.L_rew[vis] = np.maximum(self.L_rew, rev_hat - rad_rev)[vis]
        cost_hat = self.problem.A @ qbar
        rad_cost = self._a_norm[:, None] * r[None, :]
        self.U_cost[:, vis] = np.minimum(self.U_cost, cost_hat + rad_cost)[:, vis]
        self.L_cost[:, vis] = np.maximum(self.L_cost, cost_hat - rad_cost)[:, vis]

    def snapshot(self) -> dict:
        """Copies of the current bands, for diagnostics and tests."""
        return {
            "n_k": self.n_k.copy(),
            "U_rew": self.U_rew.copy(),
            "L_rew": self.L_rew.copy(),
            "U_cost": self.U_cost.copy(),
            "L_cost": self.L_cost.copy(),
        }


class BwkConfidenceState:
    """Reward/cost statistics for the arm-based problem."""

    def __init__(self, problem):
        K, d = problem.K, problem.d
        self.problem = problem
        self.n_k = np.zeros(K, dtype=np.int64)
        self.reward_sum = np.zeros(K)
        self.cost_sum = np.zeros((d, K))
        self.U_rew = np.full(K, np.inf)
        self.L_rew = np.zeros(K)
        self.U_cost = np.full((d, K), np.inf)
        self.L_cost = np.zeros((d, K))
        self._log_term = math.log((d + 1) * K * problem.T)

    def observe(self, k: int, periods: int, reward_sum: float, cost_sum: np.ndarray):
        self.n_k[k] += periods
        self.reward_sum[k] += reward_sum
        self.cost_sum[:, k] += cost_sum

    @property
    def visited(self) -> np.ndarray:
        return self.n_k > 0

    def rbar(self) -> np.ndarray:
        return self.reward_sum / np.maximum(self.n_k, 1)

    def cbar(self) -> np.ndarray:
        return self.cost_sum / np.maximum(self.n_k, 1)

    def radius(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(
                self.visited, np.sqrt(self._log_term / np.maximum(self.n_k, 1)), np.inf
            )

    def update_bands(self) -> None:
        vis = self.visited
        if not vis.any():
            return
        r = self.radius()
        rad_rew = self.problem.R_max * r
        rad_cost = self.problem.C_max * r[None, :]
        rbar, cbar = self.rbar(), self.cbar()
        self.U_rew[vis] = np.minimum(self.U_rew, rbar + rad_rew)[vis]
        self.L_rew[vis] = np.maximum(self.L_rew, rbar - rad_rew)[vis]
        self.U_cost[:, vis] = np.minimum(self.U_cost, cbar + rad_cost)[:, vis]
        self.L_cost[:, vis] = np.maximum(self.L_cost, cbar - rad_cost)[:, vis]

    def snapshot(self) -> dict:
        return {
            "n_k": self.n_k.copy(),
            "U_rew": self.U_rew.copy(),
            "L_rew": self.L_rew.copy(),
            "U_cost": self.U_cost.copy(),
            "L_cost": self.L_cost.copy(),
        }
