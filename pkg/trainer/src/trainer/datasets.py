"""2-D classification datasets: a deterministic toy point cloud and the
balance-scale torque reduction."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

BALANCE_CLASSES = ("L", "B", "R")  # class indices 0, 1, 2


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset2D:
    X: np.ndarray  # (n, 2) float64
    y: np.ndarray  # (n,) int64 in [0, k)
    name: str

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[1] != 2:
            raise DatasetError(f"features must be (n, 2), got {self.X.shape}")
        if len(self.X) != len(self.y):
            raise DatasetError("feature/label length mismatch")
        if not np.all(np.isfinite(self.X)):
            raise DatasetError("non-finite features")
        if self.num_classes < 2:
            raise DatasetError("need at least 2 classes")

    @property
    def num_classes(self) -> int:
        return int(self.y.max()) + 1


def make_toy(seed: int) -> Dataset2D:
    """Two separable blobs of 100 points each in [-4, 4]^2.

    Points are sampled uniformly in disks of radius 1.5 around (-1.8, -1.2)
    and (1.8, 1.2); the disk gap guarantees linear separability. Same seed,
    same data.
    """
    rng = np.random.default_rng(seed)
    centers = np.array([[-1.8, -1.2], [1.8, 1.2]])
    xs, ys = [], []
    for label, center in enumerate(centers):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=100)
        radius = 1.5 * np.sqrt(rng.uniform(0.0, 1.0, size=100))
        pts = center + np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)
        xs.append(pts)
        ys.append(np.full(100, label, dtype=np.int64))
    return Dataset2D(np.concatenate(xs), np.concatenate(ys), name=f"toy-seed{seed}")


def balance_scale_rows() -> list[tuple[str, int, int, int, int]]:
    """The canonical 625 balance-scale rows (class, LW, LD, RW, RD).

    The dataset is a complete enumeration of weights and distances in
    {1..5}^4 with the class determined by the torque comparison, so it is
    regenerated exactly rather than downloaded.
    """
    rows = []
    for lw in range(1, 6):
        for ld in range(1, 6):
            for rw in range(1, 6):
                for rd in range(1, 6):
                    left, right = lw * ld, rw * rd
                    cls = "L" if left > right else ("R" if right > left else "B")
                    rows.append((cls, lw, ld, rw, rd))
    return rows


def load_balance_scale_csv(path) -> list[tuple[str, int, int, int, int]]:
    """Read the official headerless CSV format: class,LW,LD,RW,RD."""
    rows = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row:
                    continue
                try:
                    cls = row[0].strip()
                    lw, ld, rw, rd = (int(v) for v in row[1:5])
                except (ValueError, IndexError) as exc:
                    raise DatasetError(f"{path}:{lineno}: bad row {row}") from exc
                if cls not in BALANCE_CLASSES:
                    raise DatasetError(f"{path}:{lineno}: unknown class {cls!r}")
                rows.append((cls, lw, ld, rw, rd))
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    return rows


def reduce_balance_scale(rows) -> Dataset2D:
    """Reduce to 2-D torques: x1 = LW*LD, x2 = RW*RD; classes L/B/R -> 0/1/2."""
    if not rows:
        raise DatasetError("no balance-scale rows")
    X = np.empty((len(rows), 2), dtype=np.float64)
    y = np.empty(len(rows), dtype=np.int64)
    for i, (cls, lw, ld, rw, rd) in enumerate(rows):
        X[i] = (lw * ld, rw * rd)
        y[i] = BALANCE_CLASSES.index(cls)
    return Dataset2D(X, y, name="balance-scale")


def write_points_csv(ds: Dataset2D, path) -> None:
    """Dump the dataset in the interchange points format (x1,x2,label)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x1", "x2", "label"])
        for (x1, x2), label in zip(ds.X, ds.y):
            writer.writerow([repr(float(x1)), repr(float(x2)), int(label)])
