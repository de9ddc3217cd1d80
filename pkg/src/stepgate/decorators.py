"""Before/after hook pairs around the per-batch training stage.

Decorators add debugging behavior (dump batches, time the loop) without
touching model code. They get read access to stage inputs/outputs and
append-only access to run metrics and the run's artifact directory via
the sink; they must not mutate training state.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Callable, Sequence

from .backend.data import format_csv
from .backend.train import StageInputs, StageOutputs
from .errors import DuplicateMetric

Stage = Callable[[StageInputs], StageOutputs]


class MetricSink:
    """Append-only metric collection plus the run's artifact directory."""

    def __init__(self, artifacts_dir: Path):
        self.artifacts_dir = Path(artifacts_dir)
        self._metrics: dict[str, float] = {}

    def add_metric(self, key: str, value: float) -> None:
        if key in self._metrics:
            raise DuplicateMetric(f"decorator metric {key!r} already recorded")
        self._metrics[key] = float(value)

    def metrics(self) -> dict[str, float]:
        return dict(self._metrics)


class Decorator:
    """Base hook pair; subclasses override what they need."""

    def bind(self, sink: MetricSink) -> None:
        self._sink = sink

    @property
    def sink(self) -> MetricSink | None:
        return getattr(self, "_sink", None)

    def before(self, inputs: StageInputs) -> None:
        pass

    def after(self, inputs: StageInputs, outputs: StageOutputs) -> None:
        pass

    def finalize(self, sink: MetricSink) -> None:
        pass


def wrap_stage(stage: Stage, decorator: Decorator) -> Stage:
    """Stage that runs before-hook, the stage, then the after-hook."""

    def wrapped(inputs: StageInputs) -> StageOutputs:
        decorator.before(inputs)
        outputs = stage(inputs)
        decorator.after(inputs, outputs)
        return outputs

    return wrapped


def apply_decorators(stage: Stage, decorators: Sequence[Decorator]) -> Stage:
    """Compose outside-in: the first decorator in the list is outermost."""
    for d in reversed(decorators):
        stage = wrap_stage(stage, d)
    return stage


class BatchSaver(Decorator):
    """Dump each distinct batch once as CSV for visual inspection.

    Files land in <dir>/batch_0000.csv etc.; the directory defaults to
    <run artifacts>/batches when bound to a run.
    """

    def __init__(self, directory: str | Path | None = None):
        self._dir = Path(directory) if directory is not None else None
        self._seen: set[int] = set()

    def _target_dir(self) -> Path:
        if self._dir is not None:
            return self._dir
        if self.sink is not None:
            return self.sink.artifacts_dir / "batches"
        raise ValueError("BatchSaver needs a directory or a bound run sink")

    def before(self, inputs: StageInputs) -> None:
        if inputs.batch_index in self._seen:
            return
        self._seen.add(inputs.batch_index)
        directory = self._target_dir()
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"batch_{inputs.batch_index:04d}.csv"
        path.write_text(format_csv(inputs.features, inputs.labels), encoding="utf-8")


class Timer(Decorator):
    """Accumulate wall time spent inside the training stage."""

    metric_key = "train/wall_time_seconds"

    def __init__(self):
        self._started: list[float] = []
        self.total = 0.0

    def before(self, inputs: StageInputs) -> None:
        self._started.append(time.perf_counter())

    def after(self, inputs: StageInputs, outputs: StageOutputs) -> None:
        self.total += time.perf_counter() - self._started.pop()

    def finalize(self, sink: MetricSink) -> None:
        sink.add_metric(self.metric_key, self.total)
