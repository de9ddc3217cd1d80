"""Synthetic datasets for the reference backend.

A dataset split is a dense feature matrix plus integer labels. The only
generator is Gaussian blobs: class centers drawn once, samples scattered
around them. Everything is a pure function of its seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from ..errors import ShapeMismatch
from .rng import Rng


@dataclass
class DatasetSplit:
    """Features (n, d) float64 and labels (n,) int64 in [0, n_classes)."""

    features: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ShapeMismatch(f"features must be 2-D, got shape {self.features.shape}")
        if self.labels.shape != (self.features.shape[0],):
            raise ShapeMismatch(
                f"labels shape {self.labels.shape} does not match {self.features.shape[0]} samples"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ShapeMismatch(f"labels must lie in [0, {self.n_classes})")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def to_csv(self) -> str:
        return format_csv(self.features, self.labels)

    def save_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def format_csv(features: np.ndarray, labels: np.ndarray) -> str:
    """CSV with header f0..f{d-1},label; floats use shortest round-trip repr."""
    d = features.shape[1]
    lines = [",".join([f"f{i}" for i in range(d)] + ["label"])]
    for row, lab in zip(features, labels):
        lines.append(",".join(repr(float(v)) for v in row) + f",{int(lab)}")
    return "\n".join(lines) + "\n"


def make_blobs(
    n_per_class: int,
    d: int,
    n_classes: int,
    spread: float,
    center_scale: float,
    seed: int,
    center_seed: int | None = None,
) -> tuple[DatasetSplit, DatasetSplit]:
    """Seeded Gaussian blobs; returns (train, val) of equal size.

    Centers are drawn from stream seed+2 (or center_seed+2 when given, so
    two tasks can share centers while drawing fresh samples), train noise
    from stream seed, validation noise from the derived stream seed+1.
    """
    if n_per_class <= 0 or d <= 0 or n_classes <= 0:
        raise ValueError("n_per_class, d and n_classes must be positive")
    if spread < 0:
        raise ValueError("spread must be >= 0")
    if center_seed is None:
        center_seed = seed
    centers = Rng(center_seed + 2).gaussians((n_classes, d)) * center_scale
    labels = np.repeat(np.arange(n_classes, dtype=np.int64), n_per_class)
    train = _scatter(centers, labels, spread, Rng(seed))
    val = _scatter(centers, labels, spread, Rng(seed + 1))
    return train, val


def _scatter(centers: np.ndarray, labels: np.ndarray, spread: float, rng: Rng) -> DatasetSplit:
    noise = rng.gaussians((labels.shape[0], centers.shape[1]))
    features = centers[labels] + spread * noise
    return DatasetSplit(features=features, labels=labels.copy(), n_classes=centers.shape[0])


class DataModule(Protocol):
    """Provider of (train, val) splits; stands in for a full data pipeline."""

    def splits(self) -> tuple[DatasetSplit, DatasetSplit]: ...


@dataclass
class BlobsDataModule:
    n_per_class: int = 100
    n_features: int = 2
    n_classes: int = 3
    spread: float = 1.0
    center_scale: float = 3.0
    seed: int = 0
    center_seed: int | None = None
    _cache: tuple[DatasetSplit, DatasetSplit] | None = field(default=None, repr=False)

    def splits(self) -> tuple[DatasetSplit, DatasetSplit]:
        if self._cache is None:
            self._cache = make_blobs(
                self.n_per_class,
                self.n_features,
                self.n_classes,
                self.spread,
                self.center_scale,
                self.seed,
                self.center_seed,
            )
        return self._cache


@dataclass
class FixedDataModule:
    """Wraps pre-built splits; used by tests and custom steps."""

    train: DatasetSplit
    val: DatasetSplit

    def splits(self) -> tuple[DatasetSplit, DatasetSplit]:
        return self.train, self.val
