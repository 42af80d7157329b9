"""Stochastic selling environments: stepping, stopping, and reproducibility.

Shows the demand models, single-period and block stepping, the ungenerous
stopping rule (the first period whose cumulative demand would overrun any
resource ends the run), and the switch meter.
"""

import numpy as np

from ksb import BnrmInstance, BnrmProblem, make_env, make_rng_pair, replay_actions
from ksb.envs import demand_means

prices = np.array([[1.0, 2.0], [1.5, 3.0]])
for model in ("linear", "exponential", "logit"):
    print(model, "->", np.round(demand_means(model, prices), 4).tolist())

# A small instance that will stock out well before the horizon.
T = 400
problem = BnrmProblem(
    T=T, B=[60.0, 100.0], p=prices, A=np.array([[1.0, 0.0], [1.0, 2.0]])
)
inst = BnrmInstance(problem, "linear")

env_rng, _, seed_pair = make_rng_pair(42)
env = make_env(inst, env_rng)

demand, revenue, stopped = env.step(0)
print("\nfirst period: demand", demand, "revenue", revenue)

# Blocks are bit-equivalent to stepping period by period.
demand_sum, played, block_revenue, stopped = env.run_block(1, 399)
print(f"block of action 1: played {played} of 399 periods, "
      f"revenue {block_revenue:.1f}, stopped={stopped}")

record = env.record(seed_pair)
print("stop time:", record.stop_time, "switches:", record.switches)
print("run-length action log:", record.action_log)

# Replaying the logged actions with the same seed reproduces the record.
again = replay_actions(inst, 42, record.action_log)
print("replay identical:", again == record)
