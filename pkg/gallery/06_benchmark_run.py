"""A miniature benchmark: grid, CSV, and the aggregate table.

The full study crosses demand models, inventory scenarios, horizons, and
policies with hundreds of trials; this scaled-down grid runs in seconds and
shows the exact CSV schema and the per-cell aggregation used downstream.
"""

from ksb import ExperimentConfig, PolicySpec, run_benchmark, summarize

cfg = ExperimentConfig(
    instances=[("linear", "small"), ("exponential", "large")],
    T_grid=[500, 1000],
    policies=[
        PolicySpec("LS2SLP", s=8),
        PolicySpec("LS2SLP", s=12),
        PolicySpec("BZ12"),
    ],
    trials=20,
    master_seed=2024,
    parallel=2,
)

csv_text = run_benchmark(cfg)
lines = csv_text.splitlines()
print("header:", lines[0])
print("first rows:")
for line in lines[1:4]:
    print(" ", line)
print(f"({len(lines) - 1} rows total)")

print("\nper-cell summary (mean normalized revenue / mean switches):")
cells = summarize(csv_text)
for (model, inv, T, policy), stats in cells.items():
    print(f"  {model:11s} {inv:5s} T={T:5d} {policy:7s} "
          f"norm={stats['mean_normalized']:.3f}+-{stats['stderr_normalized']:.3f} "
          f"switches={stats['mean_switches']:.2f}")
