"""Command line for the training harness."""

from __future__ import annotations

import argparse
import sys

from . import datasets
from .datasets import DatasetError
from .train import TrainingError, train_and_export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relu-trainer",
        description="Train a small ReLU classifier on a 2-D dataset and "
        "export it to the network JSON interchange format.",
    )
    parser.add_argument("--dataset", choices=("toy", "balance"), required=True)
    parser.add_argument("--widths", default="8,8", help="hidden widths, e.g. 8,8")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="network JSON output path")
    parser.add_argument("--epochs", type=int, default=4000)
    parser.add_argument("--lr", type=float, default=0.02)
    parser.add_argument(
        "--balance-csv",
        help="official balance-scale CSV; the canonical rows are regenerated when omitted",
    )
    parser.add_argument("--points-out", help="also write the dataset as points CSV")
    return parser


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        widths = [int(w) for w in args.widths.split(",") if w.strip()]
    except ValueError:
        print(f"error: bad widths {args.widths!r}", file=sys.stderr)
        return 1
    try:
        if args.dataset == "toy":
            ds = datasets.make_toy(args.seed)
        else:
            rows = (
                datasets.load_balance_scale_csv(args.balance_csv)
                if args.balance_csv
                else datasets.balance_scale_rows()
            )
            ds = datasets.reduce_balance_scale(rows)
        if args.points_out:
            datasets.write_points_csv(ds, args.points_out)
        report = train_and_export(
            ds, widths, args.seed, args.out, epochs=args.epochs, lr=args.lr
        )
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TrainingError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return 1
    print(
        f"{ds.name}: accuracy {report.accuracy:.4f} after {report.epochs_run} "
        f"epoch(s) -> {report.out_path}"
    )
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
