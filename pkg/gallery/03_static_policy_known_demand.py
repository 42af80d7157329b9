"""The discounted static policy when demand is known.

With known means, a vertex optimum of the deterministic LP is played in
consecutive blocks, one per supported action, so the switch count is the
support size minus one.  A discount below 1 shortens every block except the
last, buying inventory headroom so the run survives to the horizon with high
probability.
"""

import math

import numpy as np

from ksb import BnrmInstance, BnrmProblem, PolicySpec, dlp_upper, run_policy
from ksb.policies import tweaked_lp_plan

# Theory-regime sizing: budgets ~ 10 sqrt(T log T) make the discount formula
# land strictly inside (0, 1).
T = 2000
B = 10.0 * math.sqrt(T * math.log(T))
problem = BnrmProblem(T=T, B=[B], p=[[1.0, 3.0]], A=[[1.0]])
inst = BnrmInstance(problem, "bernoulli", np.array([[0.9, 0.2]]))

plan = tweaked_lp_plan(inst, gamma_mode="formula")
print("discount factor:", round(plan.gamma, 4))
print("allocations:", np.round(plan.allocations, 1))
print("blocks (action, periods):", plan.blocks)
print("switches needed:", len(plan.blocks) - 1)

upper = dlp_upper(inst)
revs, stockouts = [], 0
for seed in range(200):
    rec = run_policy(PolicySpec("TweakedLP", gamma_mode="formula"), inst, seed)
    revs.append(rec.revenue)
    stockouts += rec.stop_time < T
print(f"\nmean revenue {np.mean(revs):.1f} vs LP bound {upper:.1f} "
      f"(ratio {np.mean(revs) / upper:.3f})")
print(f"early stockouts: {stockouts}/200")
