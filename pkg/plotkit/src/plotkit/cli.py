"""Command line: render a benchmark CSV into figure and table files."""

import argparse
import sys

from .render import FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render figure and switch table from CSV")
    p.add_argument("--csv", required=True, help="benchmark CSV path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--y-min", type=float, default=0.8)
    p.add_argument("--y-max", type=float, default=1.0)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        fig_path, table_path = render(
            FigureSpec(
                csv_path=args.csv, out_dir=args.out,
                y_range=(args.y_min, args.y_max),
            )
        )
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(fig_path)
    print(table_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
