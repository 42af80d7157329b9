"""Adversarial instance family with closed-form LP values.

The construction places K actions over K(d+1) products: each action has one
revenue-bearing product (price 1, consuming nothing) and d+1 block products
that map onto the d resources through repeated identity blocks.  Demand
probabilities sit at 1/2 shifted by a signed perturbation matrix, so the
deterministic LP's optimum, the pinned variants that exclude one action, and
the capped variants that ration one action all have closed forms that an LP
solver must reproduce exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .envs import BnrmInstance, BnrmProblem, make_env, make_rng_pair
from .lp import PackingProgram, Row, build_dlp, solve_packing
from .policies.scheduling import order_blocks, play_blocks, round_lengths


class QOutOfRange(ValueError):
    """The perturbation pushes some demand probability outside [0, 1]."""


class EtaTooLarge(ValueError):
    """The perturbation scale exceeds 1/2."""


class MismatchReport(AssertionError):
    """Solver values disagree with the closed forms beyond tolerance."""


@dataclass(frozen=True)
class MuMatrix:
    """Signed demand perturbations, shape (2, K), entries in [-1/2, 1/2].

    Row 0 shifts each action's revenue product; row 1 shifts the paired
    resource products (one up, one down per action).
    """

    mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))
        if self.mu.ndim != 2 or self.mu.shape[0] != 2:
            raise ValueError("mu must have shape (2, K)")
        if np.any(np.abs(self.mu) > 0.5 + 1e-12):
            raise QOutOfRange("mu entries must lie in [-1/2, 1/2]")

    @property
    def K(self) -> int:
        return self.mu.shape[1]


def hard_q_matrix(d: int, K: int, mu: MuMatrix) -> np.ndarray:
    """Demand probabilities of the adversarial family (n = K(d+1) products).

    Within action k's product block (1-indexed offsets 1..d+1 starting at
    j0 = (k-1)(d+1)+1), the cases are checked in order:

      j = j0                          -> 1/2 + mu[0, k]
      j = j0 + (k-1) % (d+1)          -> 1/2 - mu[1, k]
      j = j0 + k % (d+1)              -> 1/2 + mu[1, k]
      j in the block otherwise        -> 1/2
      j outside the block             -> 0
    """
    n = K * (d + 1)
    q = np.zeros((n, K))
    for k in range(1, K + 1):
        j0 = (k - 1) * (d + 1) + 1
        for off in range(d + 1):
            j = j0 + off
            if j == j0:
                val = 0.5 + mu.mu[0, k - 1]
            elif j == j0 + (k - 1) % (d + 1):
                val = 0.5 - mu.mu[1, k - 1]
            elif j == j0 + k % (d + 1):
                val = 0.5 + mu.mu[1, k - 1]
            else:
                val = 0.5
            q[j - 1, k - 1] = val
    if np.any(q < -1e-12) or np.any(q > 1 + 1e-12):
        raise QOutOfRange("mu pushes a demand probability outside [0, 1]")
    return q


def build_hard_bnrm(T: int, d: int, K: int, mu: MuMatrix) -> BnrmInstance:
    """Adversarial instance: B_i = T/2, block consumption, unit prices.

    The consumption matrix repeats ``[0 | I_d]`` per action block, so product
    j0 (the priced one) consumes nothing and product j0 + i consumes one unit
    of resource i.  The theorem regime wants K >= 2(d+1); smaller K is
    allowed for LP verification and flagged with a warning.
    """
    if K < 2:
        raise ValueError("need at least two actions")
    if mu.K != K:
        raise ValueError("mu has wrong number of columns")
    if K < 2 * (d + 1):
        warnings.warn(
            f"K={K} below the theorem regime 2(d+1)={2 * (d + 1)}; "
            "LP verification is still meaningful",
            UserWarning,
        )
    n = K * (d + 1)
    A = np.zeros((d, n))
    p = np.zeros((n, K))
    for k in range(K):
        base = k * (d + 1)
        p[base, k] = 1.0
        for i in range(d):
            A[i, base + 1 + i] = 1.0
    q = hard_q_matrix(d, K, mu)
    problem = BnrmProblem(T=int(T), B=np.full(d, T / 2), p=p, A=A)
    return BnrmInstance(problem, "bernoulli", q)


def lemma1_mu(T: int, d: int, alpha: float, c0: float) -> tuple[float, MuMatrix]:
    """Perturbation with one favored and one unfavored action, K = d + 1.

    eta = c0 * T^(-alpha); row 0 is (eta/(d+1), 0, ..., 0, -eta/(d+1)) and
    row 1 is constant eta.
    """
    if not 0.0 <= alpha < 0.5:
        raise ValueError("alpha must lie in [0, 1/2)")
    eta = c0 * float(T) ** (-alpha)
    if eta > 0.5:
        raise EtaTooLarge(f"eta = {eta} exceeds 1/2")
    K = d + 1
    mu = np.zeros((2, K))
    mu[0, 0] = eta / (d + 1)
    mu[0, -1] = -eta / (d + 1)
    mu[1, :] = eta
    return eta, MuMatrix(mu)


def lemma1_sp_means(d: int, eta: float):
    """Equivalent per-action reward/cost means of the K = d+1 family.

    r_k = 1/2 + mu[0,k]; c[i,k] is 1/2 + eta on the diagonal k = i,
    1/2 - eta on k = i + 1, and 1/2 elsewhere.
    """
    K = d + 1
    r = np.full(K, 0.5)
    r[0] += eta / (d + 1)
    r[-1] -= eta / (d + 1)
    c = np.full((d, K), 0.5)
    for i in range(d):
        c[i, i] += eta
        c[i, i + 1] -= eta
    return r, c


def lemma1_closed_forms(T: float, d: int, eta: float, zeta: float) -> dict:
    """Exact optimal values of the full, pinned, and capped programs.

    Returns J_full = T/2; J0[l] for each pinned program (action l forced to
    zero), l = 1..d+1; J_capped[l] for the rationed programs (action l capped
    at zeta*T/(d+1)), which decompose as zeta*J_full + (1-zeta)*J0[l]; and
    the normalized best-case gap Delta.

    For a middle exclusion 1 < l <= d two supports compete: spreading mass
    uniformly over actions l+1..d+1 (giving the interpolation
    zeta*J_full + (1-zeta)*J0[l] in the capped case), or a staircase over
    actions 1..l-1 whose loads decrease arithmetically to the cap, with the
    first l-1 resource rows binding.  The optimum is the larger of the two
    (for d >= 3 and l = d the staircase wins); the best exclusion is always
    l = d+1, so Delta is unaffected.
    """
    J_full = T / 2.0
    J0 = {}
    for l in range(1, d + 2):
        if l == 1:
            J0[l] = (T / 2.0) * (1.0 - 2.0 * eta / (d * (d + 1)))
        elif l <= d:
            above = (T / 2.0) * (1.0 - 2.0 * eta / ((d - l + 1) * (d + 1)))
            J0[l] = max(above, _staircase_value(T, d, l, eta, 0.0))
        else:
            J0[l] = (T / 2.0) * (
                1.0 - 4.0 * eta / (d * (d + 1) ** 2 + 4.0 * eta * (d + 1))
            )
    cap = zeta * T / (d + 1)
    J_capped = {}
    for l in range(1, d + 2):
        mixed = zeta * J_full + (1.0 - zeta) * J0[l]
        if 1 < l <= d:
            mixed = max(
                mixed,
                _staircase_value(T, d, l, eta, cap),
                _through_staircase_value(T, d, l, eta, cap),
            )
        J_capped[l] = mixed
    delta = 4.0 * (1.0 - zeta) * eta / (d * (d + 1) ** 2 + 4.0 * eta * (d + 1))
    return {"J_full": J_full, "J0": J0, "J_capped": J_capped, "Delta": delta}


def _staircase_value(T: float, d: int, l: int, eta: float, cap: float) -> float:
    """Objective of the staircase support {1..l-1} with x_l held at ``cap``.

    Loads fall arithmetically, x_i = cap + (l - i) * delta, making the first
    l - 1 resource rows bind simultaneously.  Returns -inf when that point
    is infeasible (negative step or row l violated), so callers can take a
    max over candidate supports.
    """
    if eta == 0.0:
        return T / 2.0
    delta = 2.0 * (T - l * cap) / (l * (l - 1) + 4.0 * eta)
    total = l * cap + delta * l * (l - 1) / 2.0
    if delta < 0.0 or 0.5 * total + eta * cap > T / 2.0 + 1e-12 * T:
        return -np.inf
    return (
        T / 2.0
        - eta * delta * (d + 2 - l) / (d + 1)
        + eta * cap / (d + 1)
    )


def _through_staircase_value(T, d: int, l: int, eta: float, cap: float) -> float:
    """Objective of the full arithmetic staircase pinned at x_l = ``cap``.

    All d+1 loads fall arithmetically through the cap, making every resource
    row bind; relevant only for large perturbations where the cap sits in
    the middle of an otherwise optimal spread.  Returns -inf when the point
    is infeasible.
    """
    if eta == 0.0:
        return T / 2.0
    denom = (d + 1) * (2 * l - d - 2) + 4.0 * eta
    if denom <= 0.0:
        return -np.inf
    delta = 2.0 * (T - (d + 1) * cap) / denom
    x_last = cap - (d + 1 - l) * delta
    if delta < 0.0 or x_last < -1e-12 * T:
        return -np.inf
    return T / 2.0 - eta * delta / (d + 1)


def _dlp_g_program(T: float, d: int, eta: float) -> PackingProgram:
    r, c = lemma1_sp_means(d, eta)
    K = d + 1
    rows = [Row(c[i], T / 2.0, "resource") for i in range(d)]
    rows.append(Row(np.ones(K), T, "time"))
    return PackingProgram(r, rows)


def verify_gap(
    T: float,
    d: int,
    eta: float,
    zeta: float,
    probe_trials: int = 0,
    probe_seed: int = 0,
    tol_scale: float = 1e-8,
) -> dict:
    """Cross-check every closed form against the LP solver.

    Solves the full program, each pinned variant, and each capped variant,
    comparing values against :func:`lemma1_closed_forms` within
    ``tol_scale * T``.  Also checks the full optimum's support is exactly
    d + 1 for eta > 0, and the generator's deterministic LP agrees with the
    per-action-means program.  With ``probe_trials`` > 0, additionally plays
    a clairvoyant policy restricted to d actions (hence d - 1 switches,
    one fewer than sublinear regret needs) and reports its empirical revenue
    shortfall against J_full.

    Raises:
        MismatchReport: some solver value disagrees with its closed form.
    """
    if not 0.0 <= eta <= 0.5:
        raise EtaTooLarge("eta must lie in [0, 1/2]")
    if not 0.0 <= zeta <= 1.0:
        raise ValueError("zeta must lie in [0, 1]")
    closed = lemma1_closed_forms(T, d, eta, zeta)
    tol = tol_scale * T
    K = d + 1
    checks = []
    mismatches = []

    def record(name, solver_value, closed_value):
        ok = abs(solver_value - closed_value) <= tol
        checks.append(
            {
                "name": name,
                "solver": solver_value,
                "closed_form": closed_value,
                "match": bool(ok),
            }
        )
        if not ok:
            mismatches.append(name)

    prog = _dlp_g_program(T, d, eta)
    sol_full = solve_packing(prog)
    record("J_full", sol_full.value, closed["J_full"])
    support_ok = eta == 0.0 or len(sol_full.support) == d + 1

    for l in range(1, d + 2):
        pinned = solve_packing(prog.with_pinned(l - 1, 0.0))
        record(f"J0[{l}]", pinned.value, closed["J0"][l])
    for l in range(1, d + 2):
        capped = solve_packing(prog.with_pinned(l - 1, zeta * T / (d + 1)))
        record(f"J_capped[{l}]", capped.value, closed["J_capped"][l])

    best_capped = max(closed["J_capped"].values())
    delta_from_lp = (closed["J_full"] - best_capped) / closed["J_full"]
    record("Delta", delta_from_lp, closed["Delta"])

    # the generator's price/consumption structure must induce the same LP
    mu = lemma1_mu(T, d, alpha=0.0, c0=eta)[1]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # K = d+1 < 2(d+1) regime
        inst = build_hard_bnrm(int(T), d, K, mu)
    gen_prog = build_dlp(inst.problem, inst.true_means())
    record("J_full_from_generator", solve_packing(gen_prog).value, closed["J_full"])

    report = {
        "T": T,
        "d": d,
        "eta": eta,
        "zeta": zeta,
        "checks": checks,
        "support_is_d_plus_1": bool(support_ok),
        "all_match": not mismatches and bool(support_ok),
    }

    if probe_trials > 0:
        report["probe"] = _limited_switch_probe(
            inst, eta, closed, probe_trials, probe_seed
        )

    if mismatches:
        raise MismatchReport(f"closed-form disagreement: {mismatches}")
    return report


def _limited_switch_probe(inst, eta, closed, trials: int, seed: int) -> dict:
    """Empirical revenue of a clairvoyant d-action policy on the instance.

    Plays the best pinned program's solution (support <= d, so d - 1
    switches), probing the revenue cliff that one missing switch causes.
    """
    problem = inst.problem
    d = problem.d
    best_l = max(closed["J0"], key=closed["J0"].get)
    prog = _dlp_g_program(problem.T, d, eta)
    sol = solve_packing(prog.with_pinned(best_l - 1, 0.0))
    lengths = round_lengths(sol.x)
    revenues = []
    for trial in range(trials):
        env_rng, _, _ = make_rng_pair((seed, trial))
        env = make_env(inst, env_rng)
        play_blocks(env, order_blocks(lengths, None))
        revenues.append(env.state.cum_revenue)
    mean_rev = float(np.mean(revenues))
    return {
        "pinned_action": best_l,
        "switches_used": max(int((lengths > 0).sum()) - 1, 0),
        "mean_revenue": mean_rev,
        "expected_optimum": closed["J_full"],
        "mean_shortfall": closed["J_full"] - mean_rev,
        "trials": trials,
    }
