"""Command-line entry point.

Subcommands: ``bench`` runs a declarative benchmark to CSV, ``dlp`` prints
the deterministic-LP upper bound of an instance file, ``hard`` generates an
adversarial instance, ``verify-gap`` cross-checks the closed-form LP values,
and ``replay`` re-runs one benchmark row and verifies it reproduces exactly.

Exit codes: 0 success, 1 validation error, 2 internal assertion (budget
guard trip, LP mismatch, replay divergence).  Diagnostics go to stderr;
machine output goes to stdout or the requested files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import (
    ExperimentConfig,
    dlp_upper,
    make_instance,
    read_rows,
)
from .envs import instance_from_json
from .hard_instances import MismatchReport, build_hard_bnrm, lemma1_mu, verify_gap
from .lp import solve_packing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksb",
        description="Benchmarking toolkit for resource- and switch-constrained "
        "online learning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="run a benchmark grid to CSV")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", help="output CSV path (overrides config)")
    p.add_argument("--trials", type=int, help="trials per cell (overrides config)")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--parallel", type=int, help="worker cap (default: cores)")

    p = sub.add_parser("dlp", help="print an instance's LP revenue upper bound")
    p.add_argument("--instance", required=True, help="instance JSON path")
    p.add_argument("--T", type=int, help="override the horizon length")

    p = sub.add_parser("hard", help="generate an adversarial instance")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--zeta", type=float, default=0.5)
    p.add_argument("--c0", type=float, default=0.1)
    p.add_argument("--out", required=True, help="output instance JSON path")

    p = sub.add_parser("verify-gap", help="check closed-form LP values")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--zeta", type=float, required=True)
    p.add_argument("--probe-trials", type=int, default=0)

    p = sub.add_parser("replay", help="reproduce one benchmark row exactly")
    p.add_argument("--csv", required=True, help="benchmark CSV path")
    p.add_argument("--row", type=int, required=True, help="0-based data row index")
    p.add_argument("--config", help="config JSON used for the benchmark")

    return parser


def _cmd_bench(args) -> int:
    from .bench import run_benchmark

    with open(args.config) as handle:
        cfg = ExperimentConfig.from_json(handle.read())
    if args.out is not None:
        cfg.out = args.out
    if args.trials is not None:
        cfg.trials = args.trials
    seed = os.environ.get("KSB_SEED")
    if seed is not None:
        cfg.master_seed = int(seed)
    elif args.seed is not None:
        cfg.master_seed = args.seed
    if args.parallel is not None:
        cfg.parallel = args.parallel
    if not cfg.out:
        print("no output path given (config.out or --out)", file=sys.stderr)
        return 1
    cfg.__post_init__()  # re-validate after overrides
    run_benchmark(cfg)
    rows = read_rows(cfg.out)
    bad = [r for r in rows if r["error"]]
    print(f"{len(rows)} rows -> {cfg.out}", file=sys.stderr)
    if bad:
        print(f"{len(bad)} rows carry error tags", file=sys.stderr)
        return 2
    return 0


def _cmd_dlp(args) -> int:
    with open(args.instance) as handle:
        inst = instance_from_json(handle.read())
    if args.T is not None:
        import dataclasses

        inst = dataclasses.replace(
            inst, problem=dataclasses.replace(inst.problem, T=args.T)
        )
    if hasattr(inst, "true_means"):
        value = dlp_upper(inst)
    else:
        from .lp import build_dlp_g

        value = solve_packing(
            build_dlp_g(inst.problem, inst.reward_means(), inst.cost_means())
        ).value
    print(repr(value))
    return 0


def _cmd_hard(args) -> int:
    eta, mu = lemma1_mu(args.T, args.d, args.alpha, args.c0)
    if args.K != args.d + 1:
        print(
            f"note: favored/unfavored perturbation is defined for K = d+1; "
            f"padding to K={args.K} with zero columns",
            file=sys.stderr,
        )
        import numpy as np

        padded = np.zeros((2, args.K))
        padded[:, : args.d + 1] = mu.mu
        padded[1, :] = eta
        from .hard_instances import MuMatrix

        mu = MuMatrix(padded)
    inst = build_hard_bnrm(args.T, args.d, args.K, mu)
    with open(args.out, "w") as handle:
        handle.write(inst.to_json())
    print(
        f"wrote {args.out} (eta={eta}, zeta={args.zeta} recorded for gap checks)",
        file=sys.stderr,
    )
    return 0


def _cmd_verify_gap(args) -> int:
    try:
        report = verify_gap(
            args.T, args.d, args.eta, args.zeta, probe_trials=args.probe_trials
        )
    except MismatchReport as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(report, indent=2))
    return 0


def _cmd_replay(args) -> int:
    rows = read_rows(args.csv)
    if not 0 <= args.row < len(rows):
        print(f"row {args.row} out of range (have {len(rows)})", file=sys.stderr)
        return 1
    row = rows[args.row]
    if args.config:
        with open(args.config) as handle:
            cfg = ExperimentConfig.from_json(handle.read())
        policies = {p.label: p for p in cfg.policies}
    else:
        policies = {p.label: p for p in ExperimentConfig().policies}
    if row["policy"] not in policies:
        print(f"unknown policy label {row['policy']!r}; pass --config",
              file=sys.stderr)
        return 1
    spec = policies[row["policy"]]

    from .policies import run_policy

    inst = make_instance(row["model"], row["inventory"], row["T"])
    rec = run_policy(spec, inst, row["seed"])
    upper = dlp_upper(inst)
    reproduced = {
        "revenue": rec.revenue,
        "dlp_upper": upper,
        "normalized": rec.revenue / upper,
        "switches": rec.switches,
        "stop_time": rec.stop_time,
    }
    line = ",".join(
        [
            row["model"], row["inventory"], str(row["T"]), row["policy"],
            str(row["trial"]), str(row["seed"]),
            repr(rec.revenue), repr(upper), repr(rec.revenue / upper),
            str(rec.switches), str(rec.stop_time),
            "budget-guard" if rec.guard_tripped else "",
        ]
    )
    print(line)
    for key, value in reproduced.items():
        if row[key] != value:
            print(f"replay mismatch on {key}: {row[key]!r} != {value!r}",
                  file=sys.stderr)
            return 2
    return 0


_COMMANDS = {
    "bench": _cmd_bench,
    "dlp": _cmd_dlp,
    "hard": _cmd_hard,
    "verify-gap": _cmd_verify_gap,
    "replay": _cmd_replay,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
