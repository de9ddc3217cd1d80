"""Deterministic numerical training backend: data, model, SGD, oracles."""

from .data import BlobsDataModule, DataModule, DatasetSplit, FixedDataModule, format_csv, make_blobs
from .model import (
    UNIFORM,
    ZERO_OUTPUT,
    Params,
    batch_of,
    finite_diff_grad,
    forward,
    init_params,
    loss,
    loss_and_grad,
    max_rel_error,
    predict,
    weight_l2_norm,
)
from .rng import Rng, mix64
from .train import StageInputs, StageOutputs, TrainConfig, batch_order, first_batch, train

__all__ = [
    "BlobsDataModule",
    "DataModule",
    "DatasetSplit",
    "FixedDataModule",
    "Params",
    "Rng",
    "StageInputs",
    "StageOutputs",
    "TrainConfig",
    "UNIFORM",
    "ZERO_OUTPUT",
    "batch_of",
    "batch_order",
    "finite_diff_grad",
    "first_batch",
    "format_csv",
    "forward",
    "init_params",
    "loss",
    "loss_and_grad",
    "make_blobs",
    "max_rel_error",
    "mix64",
    "predict",
    "train",
    "weight_l2_norm",
]
