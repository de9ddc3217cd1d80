"""The five stock pipeline steps, each with default checks.

analyze_data        -> data is finite and not badly imbalanced
check_loss_on_init  -> untrained-model cross-entropy equals ln(n_classes)
overfit_one_batch   -> one fixed batch can be driven to near-zero loss
regularize          -> L2 training shrinks the generalization gap vs a baseline run
transfer_learning   -> warm-starting from a source task beats from-scratch accuracy

Each step is a descriptor builder plus an executor over the shared data
module contract. Executors read dataset and training hyperparameters
from the step config (flat scalars), so persisted projects are
re-runnable from the CLI alone.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping

import numpy as np

from .backend.data import BlobsDataModule, DataModule, DatasetSplit
from .backend.model import (
    Params,
    init_params,
    loss,
    predict,
    weight_l2_norm,
)
from .backend.train import TrainConfig, first_batch, train
from .checks import CheckKind, CheckSpec
from .core import Executor, RunContext
from .errors import EmptyDataset, MissingBaseline, ShapeMismatch, StepgateError
from .metrics import Direction, MetricDef, MetricRegistry, MetricStage
from .project import StepDescriptor, StepKind, WatchedSource
from .staleness import StepState

# Dataset identity is part of each step's config so every step of a
# project scores against the same task.
DEFAULT_DATA_CONFIG: dict[str, object] = {
    "data_seed": 7,
    "n_per_class": 100,
    "n_features": 2,
    "n_classes": 3,
    "spread": 1.25,
    "center_scale": 3.0,
}

ANALYZE_DATA = "analyze_data"
CHECK_LOSS_ON_INIT = "check_loss_on_init"
OVERFIT_ONE_BATCH = "overfit_one_batch"
REGULARIZE = "regularize"
TRANSFER_LEARNING = "transfer_learning"


def default_registry() -> MetricRegistry:
    """Registry shared by the stock steps; custom projects may extend it."""
    return MetricRegistry([
        MetricDef("cross_entropy", Direction.LOWER_IS_BETTER, MetricStage.BOTH),
        MetricDef("accuracy", Direction.HIGHER_IS_BETTER, MetricStage.BOTH),
        MetricDef("generalization_gap", Direction.LOWER_IS_BETTER, MetricStage.VALIDATION),
        MetricDef("weight_norm", Direction.LOWER_IS_BETTER, MetricStage.TRAIN),
        MetricDef("n_samples", Direction.HIGHER_IS_BETTER, MetricStage.TRAIN),
        MetricDef("n_features", Direction.HIGHER_IS_BETTER, MetricStage.TRAIN),
        MetricDef("n_classes", Direction.HIGHER_IS_BETTER, MetricStage.TRAIN),
        MetricDef("min_class_proportion", Direction.HIGHER_IS_BETTER, MetricStage.TRAIN),
        MetricDef("has_non_finite", Direction.LOWER_IS_BETTER, MetricStage.TRAIN),
    ])


# ---------------------------------------------------------------------------
# data statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DataStats:
    n_samples: int
    n_features: int
    n_classes: int
    class_proportions: tuple[float, ...]
    feature_means: tuple[float, ...]
    feature_stds: tuple[float, ...]
    has_non_finite: bool

    def __post_init__(self):
        if self.n_samples <= 0 or self.n_features <= 0 or self.n_classes <= 0:
            raise ValueError("counts must be positive")
        if abs(sum(self.class_proportions) - 1.0) > 1e-9:
            raise ValueError(f"class proportions must sum to 1, got {sum(self.class_proportions)!r}")


def compute_data_stats(split: DatasetSplit) -> DataStats:
    if split.n == 0:
        raise EmptyDataset("training split is empty")
    counts = np.bincount(split.labels, minlength=split.n_classes)
    return DataStats(
        n_samples=split.n,
        n_features=split.d,
        n_classes=split.n_classes,
        class_proportions=tuple(float(c) / split.n for c in counts),
        feature_means=tuple(float(m) for m in split.features.mean(axis=0)),
        feature_stds=tuple(float(s) for s in split.features.std(axis=0)),
        has_non_finite=not bool(np.isfinite(split.features).all()),
    )


def _finite_or_none(v: float) -> float | None:
    return v if math.isfinite(v) else None


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def blobs_from_config(cfg: Mapping[str, object]) -> BlobsDataModule:
    return BlobsDataModule(
        n_per_class=int(cfg.get("n_per_class", 100)),
        n_features=int(cfg.get("n_features", 2)),
        n_classes=int(cfg.get("n_classes", 3)),
        spread=float(cfg.get("spread", 1.0)),
        center_scale=float(cfg.get("center_scale", 3.0)),
        seed=int(cfg.get("data_seed", 7)),
    )


def train_config_from(cfg: Mapping[str, object], seed: int) -> TrainConfig:
    return TrainConfig(
        lr=float(cfg.get("lr", 0.1)),
        max_iters=int(cfg.get("max_iters", 200)),
        batch_size=int(cfg.get("batch_size", 32)),
        l2=float(cfg.get("l2", 0.0)),
        seed=seed,
        hidden_width=int(cfg.get("hidden_width", 16)),
    )


def model_metrics(params: Params, train_split: DatasetSplit, val_split: DatasetSplit) -> dict[str, float]:
    """The uniform metric set every training step records."""
    t_ce = loss(params, train_split.features, train_split.labels)
    v_ce = loss(params, val_split.features, val_split.labels)
    t_acc = float(np.mean(predict(params, train_split.features) == train_split.labels))
    v_acc = float(np.mean(predict(params, val_split.features) == val_split.labels))
    return {
        "train/cross_entropy": t_ce,
        "train/accuracy": t_acc,
        "validation/cross_entropy": v_ce,
        "validation/accuracy": v_acc,
        "validation/generalization_gap": v_ce - t_ce,
        "train/weight_norm": weight_l2_norm(params),
    }


def _dump_history(ctx: RunContext, history: list[float], name: str = "loss_history.json") -> None:
    (ctx.artifacts_dir / name).write_text(
        json.dumps([_finite_or_none(v) for v in history]) + "\n", encoding="utf-8"
    )


def _require_baseline(ctx: RunContext, needed_metric: str) -> str:
    baseline = str(ctx.config.get("baseline_step", ""))
    if not baseline:
        raise MissingBaseline(f"step {ctx.step.name!r} has no baseline_step configured")
    usable = [
        r for r in ctx.history.runs_for_step(baseline)
        if r.final_state is StepState.PASSED and needed_metric in r.metrics
    ]
    if not usable:
        raise MissingBaseline(
            f"baseline step {baseline!r} has no Passed run recording {needed_metric}"
        )
    return baseline


# ---------------------------------------------------------------------------
# analyze_data
# ---------------------------------------------------------------------------

def analyze_data_step(
    name: str = ANALYZE_DATA,
    config: Mapping[str, object] | None = None,
    watched_sources: tuple[WatchedSource, ...] = (),
) -> StepDescriptor:
    cfg = {**DEFAULT_DATA_CONFIG, "seed": 0, **(config or {})}
    n_classes = int(cfg["n_classes"])
    checks = (
        CheckSpec(CheckKind.CLOSE_TO, "train/has_non_finite", value=0.0, tol=0.0),
        CheckSpec(CheckKind.GREATER_THAN, "train/min_class_proportion", value=1.0 / (4 * n_classes)),
    )
    return StepDescriptor(name=name, kind=StepKind.ANALYZE_DATA, checks=checks,
                          config=cfg, watched_sources=watched_sources)


def analyze_data_executor(dm: DataModule | None = None) -> Executor:
    def execute(ctx: RunContext) -> dict[str, float]:
        data = dm if dm is not None else blobs_from_config(ctx.config)
        train_split, _ = data.splits()
        stats = compute_data_stats(train_split)
        (ctx.artifacts_dir / "data_stats.json").write_text(
            json.dumps({
                "n_samples": stats.n_samples,
                "n_features": stats.n_features,
                "n_classes": stats.n_classes,
                "class_proportions": list(stats.class_proportions),
                "feature_means": [_finite_or_none(v) for v in stats.feature_means],
                "feature_stds": [_finite_or_none(v) for v in stats.feature_stds],
                "has_non_finite": stats.has_non_finite,
            }, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return {
            "train/n_samples": float(stats.n_samples),
            "train/n_features": float(stats.n_features),
            "train/n_classes": float(stats.n_classes),
            "train/min_class_proportion": min(stats.class_proportions),
            "train/has_non_finite": 1.0 if stats.has_non_finite else 0.0,
        }

    return execute


# ---------------------------------------------------------------------------
# check_loss_on_init
# ---------------------------------------------------------------------------

def check_loss_on_init_step(
    name: str = CHECK_LOSS_ON_INIT,
    config: Mapping[str, object] | None = None,
    watched_sources: tuple[WatchedSource, ...] = (),
) -> StepDescriptor:
    cfg = {**DEFAULT_DATA_CONFIG, "hidden_width": 16, "tol": 1e-3, "seed": 0, **(config or {})}
    n_classes = int(cfg["n_classes"])
    checks = (
        CheckSpec(CheckKind.CLOSE_TO, "validation/cross_entropy",
                  value=math.log(n_classes), tol=float(cfg["tol"])),
    )
    return StepDescriptor(name=name, kind=StepKind.CHECK_LOSS_ON_INIT, checks=checks,
                          config=cfg, watched_sources=watched_sources)


def check_loss_on_init_executor(dm: DataModule | None = None) -> Executor:
    def execute(ctx: RunContext) -> dict[str, float]:
        data = dm if dm is not None else blobs_from_config(ctx.config)
        _, val_split = data.splits()
        params = init_params(
            val_split.d,
            int(ctx.config.get("hidden_width", 16)),
            val_split.n_classes,
            scheme=str(ctx.config.get("init_scheme", "zero_output")),
            seed=ctx.seed,
            scale=float(ctx.config.get("init_scale", 0.1)),
        )
        v_ce = loss(params, val_split.features, val_split.labels)
        v_acc = float(np.mean(predict(params, val_split.features) == val_split.labels))
        return {"validation/cross_entropy": v_ce, "validation/accuracy": v_acc}

    return execute


# ---------------------------------------------------------------------------
# overfit_one_batch
# ---------------------------------------------------------------------------

def overfit_one_batch_step(
    name: str = OVERFIT_ONE_BATCH,
    config: Mapping[str, object] | None = None,
    watched_sources: tuple[WatchedSource, ...] = (),
) -> StepDescriptor:
    cfg = {
        **DEFAULT_DATA_CONFIG,
        "lr": 0.5, "max_iters": 2000, "batch_size": 16, "hidden_width": 16,
        "l2": 0.0, "tol": 1e-2, "seed": 0,
        **(config or {}),
    }
    checks = (CheckSpec(CheckKind.LESS_THAN, "train/cross_entropy", value=float(cfg["tol"])),)
    return StepDescriptor(name=name, kind=StepKind.OVERFIT_ONE_BATCH, checks=checks,
                          config=cfg, watched_sources=watched_sources)


def overfit_one_batch_executor(dm: DataModule | None = None) -> Executor:
    def execute(ctx: RunContext) -> dict[str, float]:
        data = dm if dm is not None else blobs_from_config(ctx.config)
        train_split, val_split = data.splits()
        tc = train_config_from(ctx.config, ctx.seed)
        if tc.max_iters < 1:
            raise ValueError("overfit_one_batch needs max_iters >= 1")
        if tc.batch_size > train_split.n:
            raise ValueError(f"batch_size {tc.batch_size} exceeds training split of {train_split.n}")
        # the one fixed batch: first batch of the seeded shuffle, kept for inspection
        batch = first_batch(train_split, tc.batch_size, ctx.seed)
        batch.save_csv(ctx.artifacts_dir / "overfit_batch.csv")
        params = init_params(train_split.d, tc.hidden_width, train_split.n_classes, seed=ctx.seed)
        final, history = train(params, batch, replace(tc, batch_size=batch.n), hooks=ctx.decorators)
        _dump_history(ctx, history)
        return model_metrics(final, batch, val_split)

    return execute


# ---------------------------------------------------------------------------
# regularize
# ---------------------------------------------------------------------------

def regularize_step(
    name: str = REGULARIZE,
    baseline_step: str = OVERFIT_ONE_BATCH,
    config: Mapping[str, object] | None = None,
    watched_sources: tuple[WatchedSource, ...] = (),
) -> StepDescriptor:
    cfg = {
        **DEFAULT_DATA_CONFIG,
        "lr": 0.1, "max_iters": 100, "batch_size": 32, "hidden_width": 16,
        "l2": 0.01, "seed": 0, "baseline_step": baseline_step,
        **(config or {}),
    }
    checks = (
        CheckSpec(CheckKind.IMPROVED_OVER, "validation/generalization_gap",
                  baseline=str(cfg["baseline_step"])),
    )
    return StepDescriptor(name=name, kind=StepKind.REGULARIZE, checks=checks,
                          config=cfg, watched_sources=watched_sources)


def full_training_executor(dm: DataModule | None = None) -> Executor:
    """Plain from-scratch training on the full split; the uniform metric set.

    Useful as a baseline step for regularize/transfer comparisons and for
    custom steps.
    """

    def execute(ctx: RunContext) -> dict[str, float]:
        data = dm if dm is not None else blobs_from_config(ctx.config)
        train_split, val_split = data.splits()
        tc = train_config_from(ctx.config, ctx.seed)
        params = init_params(train_split.d, tc.hidden_width, train_split.n_classes, seed=ctx.seed)
        final, history = train(params, train_split, tc, hooks=ctx.decorators)
        _dump_history(ctx, history)
        return model_metrics(final, train_split, val_split)

    return execute


def regularize_executor(dm: DataModule | None = None) -> Executor:
    run_training = full_training_executor(dm)

    def execute(ctx: RunContext) -> dict[str, float]:
        _require_baseline(ctx, "validation/generalization_gap")
        return run_training(ctx)

    return execute


# ---------------------------------------------------------------------------
# transfer_learning
# ---------------------------------------------------------------------------

def transfer_learning_step(
    name: str = TRANSFER_LEARNING,
    baseline_step: str = REGULARIZE,
    config: Mapping[str, object] | None = None,
    watched_sources: tuple[WatchedSource, ...] = (),
) -> StepDescriptor:
    cfg = {
        **DEFAULT_DATA_CONFIG,
        "lr": 0.1, "max_iters": 100, "batch_size": 32, "hidden_width": 16,
        "l2": 0.01, "seed": 0, "baseline_step": baseline_step,
        "source_data_seed": 1007, "source_max_iters": 2000, "source_lr": 0.1,
        **(config or {}),
    }
    checks = (
        CheckSpec(CheckKind.IMPROVED_OVER, "validation/accuracy",
                  baseline=str(cfg["baseline_step"])),
    )
    return StepDescriptor(name=name, kind=StepKind.TRANSFER_LEARNING, checks=checks,
                          config=cfg, watched_sources=watched_sources)


def transfer_learning_executor(
    dm: DataModule | None = None,
    source_params: Params | None = None,
) -> Executor:
    """Warm-start from source_params, or pretrain them on the source task.

    The stock source task shares the target's class centers but draws its
    own samples (fresh noise stream), standing in for a related dataset.
    """

    def execute(ctx: RunContext) -> dict[str, float]:
        cfg = ctx.config
        data = dm if dm is not None else blobs_from_config(cfg)
        train_split, val_split = data.splits()
        _require_baseline(ctx, "validation/accuracy")
        tc = train_config_from(cfg, ctx.seed)

        src = source_params
        if src is None:
            source_dm = BlobsDataModule(
                n_per_class=int(cfg.get("n_per_class", 100)),
                n_features=train_split.d,
                n_classes=train_split.n_classes,
                spread=float(cfg.get("spread", 1.0)),
                center_scale=float(cfg.get("center_scale", 3.0)),
                seed=int(cfg.get("source_data_seed", int(cfg.get("data_seed", 7)) + 1000)),
                center_seed=int(cfg.get("data_seed", 7)),
            )
            source_train, _ = source_dm.splits()
            src_init = init_params(source_train.d, tc.hidden_width, source_train.n_classes, seed=ctx.seed)
            src_tc = replace(
                tc,
                lr=float(cfg.get("source_lr", tc.lr)),
                max_iters=int(cfg.get("source_max_iters", 2000)),
            )
            src, _ = train(src_init, source_train, src_tc)

        if (src.d, src.h, src.n_classes) != (train_split.d, tc.hidden_width, train_split.n_classes):
            raise ShapeMismatch(
                f"source params (d={src.d}, h={src.h}, C={src.n_classes}) do not match "
                f"model layout (d={train_split.d}, h={tc.hidden_width}, C={train_split.n_classes})"
            )
        final, history = train(src.copy(), train_split, tc, hooks=ctx.decorators)
        _dump_history(ctx, history)
        return model_metrics(final, train_split, val_split)

    return execute


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

_EXECUTOR_FACTORIES: dict[StepKind, Callable[[], Executor]] = {
    StepKind.ANALYZE_DATA: analyze_data_executor,
    StepKind.CHECK_LOSS_ON_INIT: check_loss_on_init_executor,
    StepKind.OVERFIT_ONE_BATCH: overfit_one_batch_executor,
    StepKind.REGULARIZE: regularize_executor,
    StepKind.TRANSFER_LEARNING: transfer_learning_executor,
}


def executor_for(descriptor: StepDescriptor) -> Executor:
    """Config-driven executor for a stock step; Custom steps need the library API."""
    factory = _EXECUTOR_FACTORIES.get(descriptor.kind)
    if factory is None:
        raise StepgateError(
            f"step {descriptor.name!r} has kind {descriptor.kind.value}, which has no stock "
            "executor; run it through the library API with your own executor"
        )
    return factory()


def standard_steps(
    config: Mapping[str, object] | None = None,
    watched_for: Callable[[str], tuple[WatchedSource, ...]] | None = None,
) -> list[StepDescriptor]:
    """The five stock steps in recipe order, sharing one dataset config."""
    watched = watched_for or (lambda name: ())
    shared = dict(config or {})
    return [
        analyze_data_step(config=shared, watched_sources=watched(ANALYZE_DATA)),
        check_loss_on_init_step(config=shared, watched_sources=watched(CHECK_LOSS_ON_INIT)),
        overfit_one_batch_step(config=shared, watched_sources=watched(OVERFIT_ONE_BATCH)),
        regularize_step(config=shared, watched_sources=watched(REGULARIZE)),
        transfer_learning_step(config=shared, watched_sources=watched(TRANSFER_LEARNING)),
    ]
