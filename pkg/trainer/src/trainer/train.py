"""Train small ReLU classifiers and export them to the network JSON format.

Training is deterministic for a fixed seed: single-threaded CPU torch,
full-batch Adam, double precision. Features are scaled by a fixed power of
two during optimization and the scale is folded into the exported first
layer, so the exported network operates on raw feature space exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .datasets import Dataset2D

# 1/32 keeps balance-scale torques (up to 25) near unit scale; a power of
# two so folding it into float weights is exact.
FEATURE_SCALE = 1.0 / 32.0
TARGET_ACCURACY = 0.99


class TrainingError(RuntimeError):
    pass


@dataclass
class TrainReport:
    accuracy: float
    epochs_run: int
    final_loss: float
    widths: list[int]
    seed: int
    out_path: str


def _build_model(widths: list[int], k: int) -> nn.Sequential:
    dims = [2] + list(widths)
    layers: list[nn.Module] = []
    for a, b in zip(dims, dims[1:]):
        layers += [nn.Linear(a, b), nn.ReLU()]
    layers.append(nn.Linear(dims[-1], k))
    return nn.Sequential(*layers)


def _export_dict(model: nn.Sequential, ds: Dataset2D, report: TrainReport) -> dict:
    linears = [m for m in model if isinstance(m, nn.Linear)]
    layers = []
    for i, lin in enumerate(linears):
        w = lin.weight.detach().numpy().astype(np.float64)
        b = lin.bias.detach().numpy().astype(np.float64)
        if i == 0:
            w = w * FEATURE_SCALE  # exact: scale is a power of two
        layers.append(
            {
                "activation": "linear" if i == len(linears) - 1 else "relu",
                "weights": w.tolist(),
                "biases": b.tolist(),
            }
        )
    return {
        "kind": "network",
        "input_dim": 2,
        "name": ds.name,
        "layers": layers,
        "metadata": {
            "optimizer": "adam-full-batch",
            "seed": report.seed,
            "epochs_run": report.epochs_run,
            "training_accuracy": report.accuracy,
            "feature_scale_folded": FEATURE_SCALE,
        },
    }


def forward_logits(doc: dict, X: np.ndarray) -> np.ndarray:
    """Forward pass of an exported network document on raw features."""
    acts = np.asarray(X, dtype=np.float64)
    layers = doc["layers"]
    for i, layer in enumerate(layers):
        w = np.asarray(layer["weights"])
        b = np.asarray(layer["biases"])
        acts = acts @ w.T + b
        if i < len(layers) - 1:
            acts = np.maximum(acts, 0.0)
    return acts


def train_and_export(
    ds: Dataset2D,
    widths: list[int],
    seed: int,
    out_path,
    epochs: int = 4000,
    lr: float = 0.02,
) -> TrainReport:
    """Train to >= 99% training accuracy and write the interchange JSON.

    Raises TrainingError when the accuracy target is not reached within the
    epoch budget (nothing is written in that case).
    """
    if not widths:
        raise TrainingError("at least one hidden layer width required")
    torch.manual_seed(seed)
    torch.set_num_threads(1)
    model = _build_model(widths, ds.num_classes).double()
    X = torch.from_numpy(ds.X * FEATURE_SCALE)
    y = torch.from_numpy(ds.y)
    criterion = nn.CrossEntropyLoss()
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)

    loss_value = float("inf")
    epochs_run = 0
    for epoch in range(epochs):
        optimizer.zero_grad()
        logits = model(X)
        loss = criterion(logits, y)
        loss.backward()
        optimizer.step()
        loss_value = loss.item()
        epochs_run = epoch + 1
        if epoch % 50 == 49 and float((logits.argmax(dim=1) == y).double().mean()) == 1.0:
            break

    report = TrainReport(
        accuracy=0.0,
        epochs_run=epochs_run,
        final_loss=loss_value,
        widths=list(widths),
        seed=seed,
        out_path=str(out_path),
    )
    # grade the exported artifact, not the in-memory model
    doc = _export_dict(model, ds, report)
    pred = np.argmax(forward_logits(doc, ds.X), axis=1)
    report.accuracy = float(np.mean(pred == ds.y))
    doc["metadata"]["training_accuracy"] = report.accuracy
    if report.accuracy < TARGET_ACCURACY:
        raise TrainingError(
            f"accuracy {report.accuracy:.4f} below {TARGET_ACCURACY} "
            f"after {epochs_run} epoch(s)"
        )
    Path(out_path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return report
