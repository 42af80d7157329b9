"""Render a benchmark CSV into the panel figure and switch table.

The input schema is the benchmark harness's documented CSV:

    model,inventory,T,policy,trial,seed,revenue,dlp_upper,normalized,
    switches,stop_time,error

The figure is a (demand model) x (inventory scenario) grid of panels, each
plotting mean normalized revenue against the horizon per policy, with the
y-axis starting at 0.8 so weak policies drop out of view (they stay in the
legend).  The table lists mean switch counts per policy and horizon, one
block per panel, rounded to two decimals.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

EXPECTED_HEADER = [
    "model", "inventory", "T", "policy", "trial", "seed",
    "revenue", "dlp_upper", "normalized", "switches", "stop_time", "error",
]

MODELS = ("linear", "exponential", "logit")
INVENTORIES = ("small", "large")


class SchemaError(ValueError):
    """The CSV header does not match the documented benchmark schema."""


class MissingCell(UserWarning):
    """A (model, inventory, policy, T) cell has no usable rows."""


@dataclass
class FigureSpec:
    """What to render and where.

    ``policies`` defaults to every policy present in the CSV, in first-seen
    order.  ``y_range`` fixes the visible revenue band.
    """

    csv_path: str
    out_dir: str
    policies: list[str] | None = None
    y_range: tuple[float, float] = (0.8, 1.0)
    figure_name: str = "revenue_panels.png"
    table_name: str = "switch_table.txt"
    dpi: int = 150


def read_rows(csv_path: str) -> list[dict]:
    with open(csv_path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != EXPECTED_HEADER:
            raise SchemaError(
                f"expected header {EXPECTED_HEADER}, got {reader.fieldnames}"
            )
        rows = []
        for raw in reader:
            if raw["error"] and raw["error"] != "budget-guard":
                continue
            rows.append(
                {
                    "model": raw["model"],
                    "inventory": raw["inventory"],
                    "T": int(raw["T"]),
                    "policy": raw["policy"],
                    "normalized": float(raw["normalized"]),
                    "switches": float(raw["switches"]),
                }
            )
    return rows


def aggregate(rows: list[dict]):
    """Per-(model, inventory, policy, T) means of normalized revenue and switches."""
    sums: dict[tuple, list] = {}
    for row in rows:
        key = (row["model"], row["inventory"], row["policy"], row["T"])
        cell = sums.setdefault(key, [0.0, 0.0, 0])
        cell[0] += row["normalized"]
        cell[1] += row["switches"]
        cell[2] += 1
    return {
        key: {"normalized": s[0] / s[2], "switches": s[1] / s[2], "trials": s[2]}
        for key, s in sums.items()
    }


def _policies_in_order(rows):
    seen = []
    for row in rows:
        if row["policy"] not in seen:
            seen.append(row["policy"])
    return seen


def render(spec: FigureSpec) -> tuple[Path, Path]:
    """Write the panel figure and the switch table; returns their paths.

    Re-running with the same inputs overwrites the outputs deterministically.
    """
    rows = read_rows(spec.csv_path)
    cells = aggregate(rows)
    policies = spec.policies or _policies_in_order(rows)
    missing = [p for p in policies if not any(k[2] == p for k in cells)]
    if missing:
        raise ValueError(f"policies not present in the CSV: {missing}")

    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig_path = out_dir / spec.figure_name
    table_path = out_dir / spec.table_name

    fig, axes = plt.subplots(
        len(MODELS), len(INVENTORIES), figsize=(10, 11), sharex="col"
    )
    for r, model in enumerate(MODELS):
        for c, inventory in enumerate(INVENTORIES):
            ax = axes[r][c]
            panel_has_data = False
            for policy in policies:
                ts = sorted(
                    k[3] for k in cells if k[:3] == (model, inventory, policy)
                )
                if not ts:
                    warnings.warn(
                        f"no rows for {model}/{inventory}/{policy}", MissingCell
                    )
                    continue
                ys = [cells[(model, inventory, policy, t)]["normalized"] for t in ts]
                ax.plot(ts, ys, marker="o", markersize=3, label=policy)
                panel_has_data = True
            ax.set_title(f"{model} demand, {inventory} inventory", fontsize=10)
            ax.set_ylim(*spec.y_range)
            ax.grid(True, alpha=0.3)
            if not panel_has_data:
                ax.annotate(
                    "no data", xy=(0.5, 0.5), xycoords="axes fraction",
                    ha="center", va="center", color="gray",
                )
            if r == len(MODELS) - 1:
                ax.set_xlabel("horizon T")
            if c == 0:
                ax.set_ylabel("mean revenue / LP bound")
    handles, labels = [], []
    for row_axes in axes:
        for ax in row_axes:
            for h, l in zip(*ax.get_legend_handles_labels()):
                if l not in labels:
                    handles.append(h)
                    labels.append(l)
    fig.legend(handles, labels, loc="lower center", ncol=max(len(labels), 1))
    fig.tight_layout(rect=(0, 0.04, 1, 1))
    fig.savefig(fig_path, dpi=spec.dpi)
    plt.close(fig)

    table_path.write_text(switch_table(cells, policies))
    return fig_path, table_path


def switch_table(cells: dict, policies: list[str]) -> str:
    """Mean switch counts, one block per (model, inventory), 2 decimals."""
    lines = []
    for model in MODELS:
        for inventory in INVENTORIES:
            ts = sorted({k[3] for k in cells if k[0] == model and k[1] == inventory})
            if not ts:
                continue
            lines.append(f"== {model} demand, {inventory} inventory ==")
            header = "policy".ljust(16) + "".join(f"{t:>10d}" for t in ts)
            lines.append(header)
            for policy in policies:
                row = [policy.ljust(16)]
                for t in ts:
                    cell = cells.get((model, inventory, policy, t))
                    row.append(f"{cell['switches']:>10.2f}" if cell else " " * 10)
                lines.append("".join(row))
            lines.append("")
    return "\n".join(lines)
