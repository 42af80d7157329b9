"""Adversarial instances and their closed-form LP values.

The generator builds a pricing problem whose deterministic LP has the
uniform spread as its unique optimum, so every action matters: excluding (or
rationing) any one action costs a closed-form revenue gap.  The verifier
solves all the variants and checks them against the formulas; a clairvoyant
policy restricted to one switch too few probes the gap empirically.
"""

import json

import numpy as np

from ksb.hard_instances import (
    build_hard_bnrm,
    lemma1_closed_forms,
    lemma1_mu,
    verify_gap,
)
from ksb.lp import build_dlp, solve_packing

T, d = 300, 2
eta, mu = lemma1_mu(T, d, alpha=0.0, c0=0.1)
print("perturbation scale eta:", eta)
print("mu:\n", np.round(mu.mu, 4))

inst = build_hard_bnrm(T, d, d + 1, mu)
print("\nproducts:", inst.problem.n, " resources:", d, " actions:", d + 1)
sol = solve_packing(build_dlp(inst.problem, inst.true_means()))
print("LP optimum:", np.round(sol.x, 2), "value", round(sol.value, 2),
      "(uniform spread, support", len(sol.support), ")")

forms = lemma1_closed_forms(T, d, eta, zeta=0.5)
print("\nclosed forms:")
print("  full:", forms["J_full"])
for l, v in forms["J0"].items():
    print(f"  action {l} excluded: {v:.4f}")
print("  normalized gap Delta:", round(forms["Delta"], 6))

report = verify_gap(T, d, eta, zeta=0.5, probe_trials=50, probe_seed=1)
print("\nall solver values match closed forms:", report["all_match"])
print("probe (one switch short):",
      json.dumps(report["probe"], indent=2, default=float))
