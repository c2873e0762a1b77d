"""Training harness producing skelex-compatible network JSON files."""

from .datasets import (
    Dataset2D,
    DatasetError,
    balance_scale_rows,
    load_balance_scale_csv,
    make_toy,
    reduce_balance_scale,
    write_points_csv,
)
from .train import TrainingError, TrainReport, forward_logits, train_and_export

__all__ = [
    "Dataset2D",
    "DatasetError",
    "TrainReport",
    "TrainingError",
    "balance_scale_rows",
    "forward_logits",
    "load_balance_scale_csv",
    "make_toy",
    "reduce_balance_scale",
    "train_and_export",
    "write_points_csv",
]
