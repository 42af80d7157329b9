"""Anatomy of one limited-switch learning trajectory.

A switching budget s buys floor((s-d-1)/(K-1)) learning epochs before a
final exploitation epoch.  Each learning epoch solves a pessimistic program
to set a revenue floor, then one optimistic program per action, and plays
the balanced average in consecutive blocks.  The trace below shows the epoch
grid, the confidence bands tightening, and where the switches go.
"""

import numpy as np

from ksb import PolicySpec, epoch_grid, make_instance, nu
from ksb.policies import run_ls2slp

inst = make_instance("linear", "small", 5000)
K, d, T = inst.problem.K, inst.problem.d, inst.problem.T

s = 12
v = nu(s, d, K)
grid = epoch_grid(T, K, v)
print(f"budget s={s} buys {v} learning epochs; grid targets {grid}")

trace = []
rec = run_ls2slp(PolicySpec("LS2SLP", s=s), inst, seed=3, trace=trace)

for entry in trace:
    print(f"\nepoch {entry['epoch']}: periods "
          f"{entry['epoch_start']}..{entry['epoch_end']} "
          f"(target end {entry['epoch_target']})")
    print("  revenue floor:", round(entry["j_pes"], 1))
    print("  allocations:", np.round(entry["allocations"], 1))
    bands = entry["bands"]
    width = np.where(
        np.isfinite(bands["U_rew"]), bands["U_rew"] - bands["L_rew"], np.inf
    )
    print("  reward-band widths:", np.round(width, 2))

print("\nfinal record: revenue", round(rec.revenue, 1),
      "switches", rec.switches, "(budget", s, ") stop", rec.stop_time)
print("action log:", rec.action_log)
