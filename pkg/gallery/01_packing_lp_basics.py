"""Packing LPs and vertex solutions.

Builds the deterministic LP of a two-product pricing problem, solves it to a
basic optimal point, and inspects the structure a vertex solution carries:
support, basis, duals, and the support-size bound.
"""

import numpy as np

from ksb import BnrmProblem, build_dlp, solve_packing
from ksb.envs import demand_means

# Two products made from three resources, five candidate price vectors.
prices = np.array([[1.0, 1.0, 2.0, 4.0, 4.0], [1.5, 2.0, 3.0, 4.0, 6.5]])
A = np.array([[1.0, 1.0], [3.0, 1.0], [0.0, 5.0]])
T = 1000
problem = BnrmProblem(T=T, B=[0.3 * T, 0.5 * T, 0.7 * T], p=prices, A=A)

q = demand_means("linear", prices)
print("mean demand per price vector:\n", np.round(q, 3))

prog = build_dlp(problem, q)
print("\nobjective (expected revenue per period):", np.round(prog.objective, 3))
for row in prog.rows:
    print(f"  {row.kind:8s} rhs={row.rhs:7.1f} coeffs={np.round(row.coeffs, 2)}")

sol = solve_packing(prog)
print("\noptimal value:", round(sol.value, 2))
print("optimal point:", np.round(sol.x, 1))
print("support:", sol.support, " (never larger than the number of rows:",
      len(prog.rows), ")")
print("duals:", np.round(sol.duals, 4))

# Strong duality ties the two sides together.
rhs = np.array([row.rhs for row in prog.rows])
print("dual value y.b =", round(float(sol.duals @ rhs), 2), "= primal value")

# Pinning variables adds rows and can only lower the optimum.  Actions 3
# and 4 have identical means here (the second product's demand is clamped
# to zero at both price points), so both must go before the value moves.
pinned = solve_packing(prog.with_pinned(3).with_pinned(4))
print("\nwith the two best actions excluded:", round(pinned.value, 2))
