"""Plain SGD training loop with a decoratable per-batch stage.

Batch order comes from one seeded shuffle of the split, chunked into
consecutive batches that are then cycled unchanged across epochs; no
per-iteration resampling, so "the first batch under seed s" is a stable
notion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import NonFiniteLoss
from .data import DatasetSplit
from .model import Params, batch_of, loss_and_grad
from .rng import Rng


@dataclass(frozen=True)
class TrainConfig:
    lr: float
    max_iters: int
    batch_size: int
    l2: float = 0.0
    seed: int = 0
    hidden_width: int = 0

    def __post_init__(self):
        # lr 0 is allowed: a zero-update run is a meaningful sanity probe
        if self.lr < 0:
            raise ValueError("lr must be >= 0")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        if self.hidden_width < 0:
            raise ValueError("hidden_width must be >= 0")


@dataclass
class StageInputs:
    """Read-only view handed to decorator before-hooks."""

    iteration: int
    batch_index: int
    features: np.ndarray
    labels: np.ndarray
    params: Params


@dataclass
class StageOutputs:
    loss: float
    grads: Params


def batch_order(n: int, batch_size: int, seed: int) -> list[np.ndarray]:
    """The seeded shuffle of range(n) chunked into consecutive batches.

    The last batch may be smaller when batch_size does not divide n.
    """
    perm = Rng(seed).shuffle(n)
    return [perm[i:i + batch_size] for i in range(0, n, batch_size)]


def first_batch(split: DatasetSplit, batch_size: int, seed: int) -> DatasetSplit:
    """The single fixed batch a run with this seed would see first."""
    return batch_of(split, batch_order(split.n, batch_size, seed)[0])


def train(
    params: Params,
    data: DatasetSplit,
    config: TrainConfig,
    hooks: Sequence = (),
) -> tuple[Params, list[float]]:
    """Run config.max_iters SGD steps; returns (new params, loss history).

    The history holds the pre-update loss of each iteration's batch, so
    lr == 0ish behavior is observable and length equals max_iters. Hooks
    are decorators applied outside-in around the per-batch stage; their
    exceptions propagate to the caller.
    """
    from ..decorators import apply_decorators  # local import avoids a package cycle

    if data.n == 0:
        raise ValueError("training split must be non-empty")
    p = params.copy()
    batches = batch_order(data.n, min(config.batch_size, data.n), config.seed)
    history: list[float] = []

    def sgd_stage(inputs: StageInputs) -> StageOutputs:
        value, grads = loss_and_grad(p, inputs.features, inputs.labels, config.l2)
        p.W1 -= config.lr * grads.W1
        p.b1 -= config.lr * grads.b1
        p.W2 -= config.lr * grads.W2
        p.b2 -= config.lr * grads.b2
        return StageOutputs(loss=value, grads=grads)

    stage = apply_decorators(sgd_stage, hooks)
    for it in range(config.max_iters):
        b = it % len(batches)
        idx = batches[b]
        out = stage(StageInputs(
            iteration=it,
            batch_index=b,
            features=data.features[idx],
            labels=data.labels[idx],
            params=p,
        ))
        if not np.isfinite(out.loss):
            raise NonFiniteLoss(f"iteration {it}: loss is {out.loss!r}")
        history.append(out.loss)
    return p, history
