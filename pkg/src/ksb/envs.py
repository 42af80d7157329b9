"""Stochastic selling environments with switch metering and early stopping.

Two environment families are provided: price-based revenue management over
products and resources, and the arm-based packing variant where each action
directly yields a random reward and random per-resource costs.  Both stop the
trajectory the first time the cumulative demand of any resource exceeds its
initial inventory (the "ungenerous" criterion) or when the horizon ends.

Randomness is drawn from counter-based streams so that runs are reproducible
bit-for-bit regardless of how trials are scheduled across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

STOCKOUT_VOID = "void"   # the violating period earns nothing and consumes nothing
STOCKOUT_KEEP = "keep"   # the violating period's sale still counts


class SteppedAfterStop(Exception):
    """An action was submitted to an environment that has already stopped."""


# ---------------------------------------------------------------------------
# Demand models
# ---------------------------------------------------------------------------

def demand_means(model: str, prices: np.ndarray, q_table: np.ndarray | None = None):
    """Mean-demand matrix q (n x K) for a demand model at the given prices.

    Models over two products:
      linear:      q1 = max(0, 0.8 - 0.15 p1),  q2 = max(0, 0.9 - 0.3 p2)
      exponential: q1 = 0.5 exp(-0.5 p1),       q2 = 0.9 exp(-p2)
      logit:       qj = exp(-pj) / (1 + exp(-p1) + exp(-p2))
    The ``bernoulli`` model returns the explicit probability table unchanged.
    """
    prices = np.asarray(prices, dtype=float)
    if model == "bernoulli":
        if q_table is None:
            raise ValueError("bernoulli model requires an explicit q table")
        q = np.asarray(q_table, dtype=float)
    elif model == "linear":
        q = np.stack(
            [
                np.maximum(0.0, 0.8 - 0.15 * prices[0]),
                np.maximum(0.0, 0.9 - 0.3 * prices[1]),
            ]
        )
    elif model == "exponential":
        q = np.stack([0.5 * np.exp(-0.5 * prices[0]), 0.9 * np.exp(-prices[1])])
    elif model == "logit":
        e1, e2 = np.exp(-prices[0]), np.exp(-prices[1])
        q = np.stack([e1, e2]) / (1.0 + e1 + e2)
    else:
        raise ValueError(f"unknown demand model {model!r}")
    if np.any(q < 0.0) or np.any(q > 1.0):
        raise ValueError("demand means must lie in [0, 1]")
    return q


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BnrmProblem:
    """Learner-visible problem data: everything except the demand law."""

    T: int
    B: np.ndarray       # (d,) initial inventories
    p: np.ndarray       # (n, K) price of product j under action k
    A: np.ndarray       # (d, n) consumption of resource i per unit of product j

    def __post_init__(self):
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def K(self) -> int:
        return self.p.shape[1]

    @property
    def a_max(self) -> float:
        return float(np.max(self.A)) if self.A.size else 0.0

    @property
    def p_max(self) -> float:
        return float(np.max(self.p)) if self.p.size else 0.0

    @property
    def B_min(self) -> float:
        return float(np.min(self.B))


@dataclass(frozen=True)
class BnrmInstance:
    """A full instance: problem data plus the hidden demand distribution.

    The mean-demand matrix is exposed through :meth:`true_means` for the
    benchmark harness and clairvoyant policies only; learning policies must
    be handed :attr:`problem`.
    """

    problem: BnrmProblem
    model: str                       # linear | exponential | logit | bernoulli
    q_table: np.ndarray | None = None

    def __post_init__(self):
        if self.q_table is not None:
            object.__setattr__(
                self, "q_table", np.asarray(self.q_table, dtype=float)
            )
        self.true_means()  # validates q range eagerly

    def true_means(self) -> np.ndarray:
        return demand_means(self.model, self.problem.p, self.q_table)

    def to_json(self) -> str:
        payload = {
            "kind": "bnrm",
            "T": self.problem.T,
            "B": self.problem.B.tolist(),
            "p": self.problem.p.tolist(),
            "A": self.problem.A.tolist(),
            "model": self.model,
        }
        if self.q_table is not None:
            payload["q"] = self.q_table.tolist()
        return json.dumps(payload, indent=2)


@dataclass(frozen=True)
class BwkProblem:
    """Learner-visible data of the arm-based packing problem."""

    T: int
    B: np.ndarray
    K: int
    R_max: float = 1.0
    C_max: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "B", np.asarray(self.B, dtype=float))

    @property
    def d(self) -> int:
        return self.B.shape[0]

    @property
    def B_min(self) -> float:
        return float(np.min(self.B))


@dataclass(frozen=True)
class BwkInstance:
    """Arm-based instance with scaled-Bernoulli rewards and costs.

    Arm k yields reward ``r_scale[k]`` with probability ``r_prob[k]`` and
    consumes ``c_scale[i,k]`` of resource i with probability ``c_prob[i,k]``.
    """

    problem: BwkProblem
    r_prob: np.ndarray              # (K,)
    c_prob: np.ndarray              # (d, K)
    r_scale: np.ndarray | None = None
    c_scale: np.ndarray | None = None

    def __post_init__(self):
        K, d = self.problem.K, self.problem.d
        object.__setattr__(self, "r_prob", np.asarray(self.r_prob, dtype=float))
        object.__setattr__(self, "c_prob", np.asarray(self.c_prob, dtype=float))
        if self.r_scale is None:
            object.__setattr__(self, "r_scale", np.full(K, self.problem.R_max))
        else:
            object.__setattr__(self, "r_scale", np.asarray(self.r_scale, float))
        if self.c_scale is None:
            object.__setattr__(self, "c_scale", np.full((d, K), self.problem.C_max))
        else:
            object.__setattr__(self, "c_scale", np.asarray(self.c_scale, float))
        if np.any(self.r_scale > self.problem.R_max) or np.any(
            self.c_scale > self.problem.C_max
        ):
            raise ValueError("support exceeds the declared bound")

    def reward_means(self) -> np.ndarray:
        return self.r_prob * self.r_scale

    def cost_means(self) -> np.ndarray:
        return self.c_prob * self.c_scale

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": "bwk",
                "T": self.problem.T,
                "B": self.problem.B.tolist(),
                "K": self.problem.K,
                "R_max": self.problem.R_max,
                "C_max": self.problem.C_max,
                "r_prob": self.r_prob.tolist(),
                "c_prob": self.c_prob.tolist(),
                "r_scale": self.r_scale.tolist(),
                "c_scale": self.c_scale.tolist(),
            },
            indent=2,
        )


def instance_from_json(text: str):
    """Rebuild an instance from its JSON document."""
    doc = json.loads(text)
    if doc["kind"] == "bnrm":
        problem = BnrmProblem(
            T=int(doc["T"]), B=doc["B"], p=doc["p"], A=doc["A"]
        )
        q = np.asarray(doc["q"]) if "q" in doc else None
        return BnrmInstance(problem, doc["model"], q)
    if doc["kind"] == "bwk":
        problem = BwkProblem(
            T=int(doc["T"]), B=doc["B"], K=int(doc["K"]),
            R_max=float(doc["R_max"]), C_max=float(doc["C_max"]),
        )
        return BwkInstance(
            problem, doc["r_prob"], doc["c_prob"], doc["r_scale"], doc["c_scale"]
        )
    raise ValueError(f"unknown instance kind {doc.get('kind')!r}")


# ---------------------------------------------------------------------------
# Run records and RNG
# ---------------------------------------------------------------------------

@dataclass
class RunRecord:
    """Outcome of one trajectory."""

    revenue: float
    switches: int
    stop_time: int
    action_log: list[tuple[int, int]]   # run-length encoded (action, periods)
    seed: tuple[int, int]               # (master component, trial index)
    guard_tripped: bool = False

    def expand_actions(self) -> np.ndarray:
        if not self.action_log:
            return np.zeros(0, dtype=int)
        return np.concatenate(
            [np.full(m, k, dtype=int) for k, m in self.action_log]
        )


def make_rng_pair(seed: int | tuple[int, int]):
    """Independent (environment, policy) generators from one seed.

    Counter-based streams keyed on the seed pair, so results cannot depend on
    scheduling order across parallel trials.
    """
    pair = (int(seed), 0) if isinstance(seed, (int, np.integer)) else tuple(seed)
    root = np.random.SeedSequence(entropy=list(pair))
    env_ss, pol_ss = root.spawn(2)
    return (
        np.random.Generator(np.random.Philox(env_ss)),
        np.random.Generator(np.random.Philox(pol_ss)),
        pair,
    )


# ---------------------------------------------------------------------------
# Environments
# ---------------------------------------------------------------------------

@dataclass
class EnvState:
    t: int = 0
    remaining: np.ndarray | None = None
    consumed: np.ndarray | None = None
    cum_revenue: float = 0.0
    last_action: int | None = None
    switches_used: int = 0
    stopped: bool = False


class _MeteredEnv:
    """Shared bookkeeping: clock, switch meter, run-length action log."""

    def __init__(self, T: int, B: np.ndarray, rng, stockout: str):
        if stockout not in (STOCKOUT_VOID, STOCKOUT_KEEP):
            raise ValueError(f"unknown stockout mode {stockout!r}")
        self.T = int(T)
        self.rng = rng
        self.stockout = stockout
        self.state = EnvState(
            remaining=np.asarray(B, dtype=float).copy(),
            consumed=np.zeros(len(B)),
        )
        self._log: list[tuple[int, int]] = []

    @property
    def stopped(self) -> bool:
        return self.state.stopped

    def _meter(self, k: int, periods: int) -> None:
        st = self.state
        if st.last_action is not None and k != st.last_action:
            st.switches_used += 1
        st.last_action = k
        if self._log and self._log[-1][0] == k:
            self._log[-1] = (k, self._log[-1][1] + periods)
        else:
            self._log.append((k, periods))

    def record(self, seed_pair, guard_tripped=False) -> RunRecord:
        return RunRecord(
            revenue=self.state.cum_revenue,
            switches=self.state.switches_used,
            stop_time=self.state.t,
            action_log=list(self._log),
            seed=tuple(seed_pair),
            guard_tripped=guard_tripped,
        )


class BnrmEnv(_MeteredEnv):
    """Price-based selling environment with independent Bernoulli demand."""

    def __init__(self, inst: BnrmInstance, rng, stockout: str = STOCKOUT_VOID):
        super().__init__(inst.problem.T, inst.problem.B, rng, stockout)
        self.inst = inst
        self.q = inst.true_means()

    def step(self, k: int):
        """Play one period at price vector k.

        Returns ``(demand, revenue_delta, stopped_after)`` where demand is the
        0/1 vector over products.
        """
        demand, revenue, _, stopped = self._advance(k, 1)
        return demand[0], revenue, stopped

    def run_block(self, k: int, periods: int):
        """Play price vector k for up to ``periods`` consecutive periods.

        Bit-equivalent to calling :meth:`step` repeatedly.  Returns
        ``(demand_sum, periods_played, revenue, stopped)`` where demand_sum
        aggregates the realized demand over the played periods (including a
        voided final period, whose demand is observed even though its sale
        does not count).
        """
        demand, revenue, played, stopped = self._advance(k, periods)
        return demand.sum(axis=0), played, revenue, stopped

    def _advance(self, k: int, periods: int):
        st = self.state
        if st.stopped:
            raise SteppedAfterStop(f"action {k} submitted after stop")
        problem = self.inst.problem
        periods = min(int(periods), self.T - st.t)
        if periods <= 0:
            raise ValueError("no periods left to play")
        self._meter(k, periods)

        u = self.rng.random((periods, problem.n))
        demand = (u < self.q[:, k]).astype(float)
        cons = demand @ problem.A.T                      # (periods, d)
        cum = np.cumsum(cons, axis=0) + st.consumed
        viol = np.flatnonzero(np.any(cum > problem.B, axis=1))

        if viol.size == 0:
            revenue = float((demand @ problem.p[:, k]).sum())
            st.consumed = cum[-1]
            st.t += periods
            st.cum_revenue += revenue
            st.remaining = problem.B - st.consumed
            if st.t >= self.T:
                st.stopped = True
            return demand, revenue, periods, st.stopped

        v = int(viol[0])                 # first violating period in the block
        revenue = float((demand[:v] @ problem.p[:, k]).sum())
        consumed = cum[v - 1] if v else st.consumed
        if self.stockout == STOCKOUT_KEEP:
            revenue += float(demand[v] @ problem.p[:, k])
            consumed = cum[v]
        st.consumed = consumed
        st.t += v + 1
        st.cum_revenue += revenue
        st.remaining = problem.B - st.consumed
        st.stopped = True
        # correct the log for the unplayed tail of the block
        unplayed = periods - (v + 1)
        if unplayed:
            kk, m = self._log[-1]
            self._log[-1] = (kk, m - unplayed)
        return demand[: v + 1], revenue, v + 1, True


class BwkEnv(_MeteredEnv):
    """Arm-pulling environment with scaled-Bernoulli rewards and costs."""

    def __init__(self, inst: BwkInstance, rng, stockout: str = STOCKOUT_VOID):
        super().__init__(inst.problem.T, inst.problem.B, rng, stockout)
        self.inst = inst

    def step(self, k: int):
        """Pull arm k once.

        Returns ``(reward, cost, stopped_after)``; the reward is the credited
        amount (zero when the period is voided at stockout), the cost vector
        is the observed draw.
        """
        _, costs, _, stopped = self._advance(k, 1)
        return self._credited, costs[0], stopped

    def run_block(self, k: int, periods: int):
        """Pull arm k for up to ``periods`` periods.

        Returns ``(reward_sum, cost_sum, periods_played, revenue, stopped)``;
        reward_sum/cost_sum aggregate observations for learner statistics,
        revenue is the credited total (they differ under void stockout).
        """
        rewards, costs, played, stopped = self._advance(k, periods)
        credited = self._credited
        return (
            float(rewards.sum()),
            costs.sum(axis=0),
            played,
            credited,
            stopped,
        )

    def _advance(self, k: int, periods: int):
        st = self.state
        if st.stopped:
            raise SteppedAfterStop(f"arm {k} pulled after stop")
        inst, problem = self.inst, self.inst.problem
        d = problem.d
        periods = min(int(periods), self.T - st.t)
        if periods <= 0:
            raise ValueError("no periods left to play")
        self._meter(k, periods)

        u = self.rng.random((periods, 1 + d))
        rewards = (u[:, 0] < inst.r_prob[k]) * inst.r_scale[k]
        costs = (u[:, 1:] < inst.c_prob[:, k]) * inst.c_scale[:, k]
        cum = np.cumsum(costs, axis=0) + st.consumed
        viol = np.flatnonzero(np.any(cum > problem.B, axis=1))

        if viol.size == 0:
            revenue = float(rewards.sum())
            st.consumed = cum[-1]
            st.t += periods
            st.cum_revenue += revenue
            st.remaining = problem.B - st.consumed
            if st.t >= self.T:
                st.stopped = True
            self._credited = revenue
            return rewards, costs, periods, st.stopped

        v = int(viol[0])
        revenue = float(rewards[:v].sum())
        consumed = cum[v - 1] if v else st.consumed
        if self.stockout == STOCKOUT_KEEP:
            revenue += float(rewards[v])
            consumed = cum[v]
        st.consumed = consumed
        st.t += v + 1
        st.cum_revenue += revenue
        st.remaining = problem.B - st.consumed
        st.stopped = True
        unplayed = periods - (v + 1)
        if unplayed:
            kk, m = self._log[-1]
            self._log[-1] = (kk, m - unplayed)
        self._credited = revenue
        return rewards[: v + 1], costs[: v + 1], v + 1, True


def make_env(inst, rng, stockout: str = STOCKOUT_VOID):
    if isinstance(inst, BnrmInstance):
        return BnrmEnv(inst, rng, stockout)
    if isinstance(inst, BwkInstance):
        return BwkEnv(inst, rng, stockout)
    raise TypeError(f"unsupported instance type {type(inst).__name__}")


def replay_actions(inst, seed, action_log, stockout: str = STOCKOUT_VOID) -> RunRecord:
    """Re-run a logged action sequence against fresh randomness from ``seed``.

    With the seed that produced the log this reproduces the original record
    bit-for-bit (the environment consumes randomness only for demand draws).
    """
    env_rng, _, pair = make_rng_pair(seed)
    env = make_env(inst, env_rng, stockout)
    for k, m in action_log:
        if env.stopped or m <= 0:
            break
        env.run_block(k, m)
    return env.record(pair)
