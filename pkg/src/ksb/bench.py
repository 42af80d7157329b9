"""Monte-Carlo benchmark harness: instance grid x policy grid x T grid x trials.

The study design follows the standard two-product, three-resource pricing
setup: five feasible price vectors, linear/exponential/logit demand, and a
small or large inventory scenario whose budgets scale with the horizon.
Revenue is normalized by the deterministic-LP upper bound at the true means.
Rows are emitted in canonical (cell, trial) order and every trial's seed is
derived from (master seed, cell index, trial index), so output is identical
no matter how trials are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .envs import BnrmInstance, BnrmProblem
from .lp import build_dlp, solve_packing
from .policies import PolicySpec, run_policy

CSV_HEADER = [
    "model", "inventory", "T", "policy", "trial", "seed",
    "revenue", "dlp_upper", "normalized", "switches", "stop_time", "error",
]

PRICE_VECTORS = np.array(
    [[1.0, 1.0, 2.0, 4.0, 4.0], [1.5, 2.0, 3.0, 4.0, 6.5]]
)
CONSUMPTION = np.array([[1.0, 1.0], [3.0, 1.0], [0.0, 5.0]])
INVENTORY_SCALES = {
    "small": np.array([0.3, 0.5, 0.7]),
    "large": np.array([1.5, 1.2, 3.0]),
}
DEMAND_MODELS = ("linear", "exponential", "logit")


def make_instance(model: str, inventory: str, T: int) -> BnrmInstance:
    """One cell of the study grid as a concrete instance."""
    if inventory not in INVENTORY_SCALES:
        raise ValueError(f"unknown inventory scenario {inventory!r}")
    problem = BnrmProblem(
        T=int(T), B=INVENTORY_SCALES[inventory] * T, p=PRICE_VECTORS, A=CONSUMPTION
    )
    return BnrmInstance(problem, model)


def dlp_upper(inst: BnrmInstance) -> float:
    """Deterministic-LP revenue upper bound at the true means."""
    return solve_packing(build_dlp(inst.problem, inst.true_means())).value


@dataclass
class ExperimentConfig:
    """Declarative benchmark description.

    ``instances`` lists (model, inventory) pairs; the grid is their cross
    product with ``T_grid`` and ``policies``.
    """

    instances: list[tuple[str, str]] = field(
        default_factory=lambda: [
            (m, inv) for m in DEMAND_MODELS for inv in ("small", "large")
        ]
    )
    T_grid: list[int] = field(
        default_factory=lambda: list(range(1000, 10001, 1000))
    )
    policies: list[PolicySpec] = field(
        default_factory=lambda: [
            PolicySpec("BZ12"),
            PolicySpec("FSW18"),
            PolicySpec("PD"),
            PolicySpec("LS2SLP", s=8),
            PolicySpec("LS2SLP", s=12),
            PolicySpec("LS2SLP", s=16),
        ]
    )
    trials: int = 100
    master_seed: int = 0
    parallel: int | None = None
    out: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if sorted(self.T_grid) != list(self.T_grid):
            raise ValueError("T_grid must be sorted ascending")

    def cells(self):
        idx = 0
        for model, inventory in self.instances:
            for T in self.T_grid:
                for policy in self.policies:
                    yield idx, model, inventory, T, policy
                    idx += 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "instances": [list(pair) for pair in self.instances],
                "T_grid": self.T_grid,
                "policies": [p.to_dict() for p in self.policies],
                "trials": self.trials,
                "master_seed": self.master_seed,
                "parallel": self.parallel,
                "out": self.out,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        doc = json.loads(text)
        kwargs = {}
        if "instances" in doc:
            kwargs["instances"] = [tuple(pair) for pair in doc["instances"]]
        for key in ("T_grid", "trials", "master_seed", "parallel", "out"):
            if key in doc and doc[key] is not None:
                kwargs[key] = doc[key]
        if "policies" in doc:
            kwargs["policies"] = [PolicySpec.from_dict(p) for p in doc["policies"]]
        return cls(**kwargs)


def trial_seed(master_seed: int, cell_index: int, trial: int) -> int:
    """Stable per-trial seed; replay needs only this value."""
    ss = np.random.SeedSequence(entropy=[int(master_seed), cell_index, trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_cell(model, inventory, T, policy: PolicySpec, trials, master_seed, cell_index):
    """All trial rows for one grid cell, in trial order."""
    inst = make_instance(model, inventory, T)
    upper = dlp_upper(inst)
    rows = []
    for trial in range(trials):
        seed = trial_seed(master_seed, cell_index, trial)
        row = {
            "model": model, "inventory": inventory, "T": T,
            "policy": policy.label, "trial": trial, "seed": seed,
        }
        try:
            rec = run_policy(policy, inst, seed)
            row.update(
                revenue=repr(rec.revenue),
                dlp_upper=repr(upper),
                normalized=repr(rec.revenue / upper),
                switches=rec.switches,
                stop_time=rec.stop_time,
                error="budget-guard" if rec.guard_tripped else "",
            )
        except Exception as exc:  # noqa: BLE001 - row-level error tagging
            row.update(
                revenue="", dlp_upper="", normalized="",
                switches="", stop_time="", error=type(exc).__name__,
            )
        rows.append(row)
    return rows


def _run_cell_packed(args):
    return run_cell(*args)


def run_benchmark(cfg: ExperimentConfig, out=None):
    """Run the whole grid and write CSV rows in canonical order.

    Args:
        cfg: experiment description.
        out: writable text stream; defaults to ``cfg.out`` (path) or an
            in-memory buffer whose contents are returned.

    Returns:
        The CSV text when no stream or path was given, else None.
    """
    owned = None
    if out is None:
        if cfg.out:
            owned = open(cfg.out, "w", newline="")
            out = owned
        else:
            out = io.StringIO()

    jobs = [
        (model, inv, T, pol, cfg.trials, cfg.master_seed, idx)
        for idx, model, inv, T, pol in cfg.cells()
    ]
    workers = cfg.parallel if cfg.parallel is not None else (os.cpu_count() or 1)
    writer = csv.DictWriter(out, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for rows in pool.map(_run_cell_packed, jobs, chunksize=1):
                    writer.writerows(rows)
        else:
            for job in jobs:
                writer.writerows(run_cell(*job))
    finally:
        if owned is not None:
            owned.close()
    if isinstance(out, io.StringIO):
        return out.getvalue()
    return None


def read_rows(csv_text_or_path):
    """Parse benchmark CSV into typed row dicts (error rows keep None fields)."""
    if isinstance(csv_text_or_path, str) and "\n" in csv_text_or_path:
        handle = io.StringIO(csv_text_or_path)
    else:
        handle = open(csv_text_or_path, newline="")
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        rows = []
        for raw in reader:
            row = dict(raw)
            row["T"] = int(raw["T"])
            row["trial"] = int(raw["trial"])
            row["seed"] = int(raw["seed"])
            for key in ("revenue", "dlp_upper", "normalized"):
                row[key] = float(raw[key]) if raw[key] else None
            for key in ("switches", "stop_time"):
                row[key] = int(raw[key]) if raw[key] else None
            rows.append(row)
    return rows


def summarize(csv_text_or_path):
    """Aggregate rows per (model, inventory, T, policy) cell.

    Returns a dict keyed by the cell tuple with mean, standard error
    (sample sd / sqrt(trials)), and median for normalized revenue and switch
    counts.  Error rows are excluded and counted separately.
    """
    rows = read_rows(csv_text_or_path)
    cells: dict[tuple, dict] = {}
    for row in rows:
        key = (row["model"], row["inventory"], row["T"], row["policy"])
        cell = cells.setdefault(key, {"normalized": [], "switches": [], "errors": 0})
        if row["error"] and row["error"] != "budget-guard":
            cell["errors"] += 1
            continue
        cell["normalized"].append(row["normalized"])
        cell["switches"].append(row["switches"])

    out = {}
    for key, cell in sorted(cells.items()):
        norm = np.array(cell["normalized"], dtype=float)
        sw = np.array(cell["switches"], dtype=float)
        n = len(norm)
        out[key] = {
            "trials": n,
            "errors": cell["errors"],
            "mean_normalized": float(norm.mean()) if n else math.nan,
            "stderr_normalized": float(norm.std(ddof=1) / math.sqrt(n))
            if n > 1 else 0.0,
            "median_normalized": float(np.median(norm)) if n else math.nan,
            "mean_switches": float(sw.mean()) if n else math.nan,
            "stderr_switches": float(sw.std(ddof=1) / math.sqrt(n))
            if n > 1 else 0.0,
            "median_switches": float(np.median(sw)) if n else math.nan,
        }
    return out
