"""Project-wide metric registry and run comparison.

Every step records into the same registry, so values are comparable
across the whole project. Metric keys carry a stage prefix
("train/cross_entropy", "validation/accuracy"); non-finite values are
rejected the moment a run tries to record them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateMetric, EmptyInput, LengthMismatch, NonFiniteMetric, UnknownMetric


class Direction(str, Enum):
    HIGHER_IS_BETTER = "HigherIsBetter"
    LOWER_IS_BETTER = "LowerIsBetter"


class MetricStage(str, Enum):
    TRAIN = "Train"
    VALIDATION = "Validation"
    BOTH = "Both"


_STAGE_PREFIX = {MetricStage.TRAIN: "train", MetricStage.VALIDATION: "validation"}
_PREFIX_STAGE = {v: k for k, v in _STAGE_PREFIX.items()}


@dataclass(frozen=True)
class MetricDef:
    name: str
    direction: Direction
    stage: MetricStage = MetricStage.BOTH

    def to_json_dict(self) -> dict:
        return {"name": self.name, "direction": self.direction.value, "stage": self.stage.value}

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "MetricDef":
        return cls(name=d["name"], direction=Direction(d["direction"]), stage=MetricStage(d["stage"]))


@dataclass(frozen=True)
class MetricValue:
    name: str
    stage: MetricStage
    value: float

    def __post_init__(self):
        if self.stage not in (MetricStage.TRAIN, MetricStage.VALIDATION):
            raise ValueError("a metric value belongs to Train or Validation, not Both")
        if not math.isfinite(self.value):
            raise NonFiniteMetric(f"metric {self.key()!r} is {self.value!r}")

    def key(self) -> str:
        return f"{_STAGE_PREFIX[self.stage]}/{self.name}"


class MetricRegistry:
    """Named metrics with a direction and an allowed stage; names unique."""

    def __init__(self, defs: Iterable[MetricDef] = ()):
        self._defs: dict[str, MetricDef] = {}
        for d in defs:
            self.register(d)

    def register(self, definition: MetricDef) -> "MetricRegistry":
        if definition.name in self._defs:
            raise DuplicateMetric(f"metric {definition.name!r} already registered")
        self._defs[definition.name] = definition
        return self

    def __len__(self) -> int:
        return len(self._defs)

    def __eq__(self, other) -> bool:
        return isinstance(other, MetricRegistry) and self.defs() == other.defs()

    def defs(self) -> list[MetricDef]:
        return list(self._defs.values())

    def names(self) -> list[str]:
        return list(self._defs)

    def get(self, name: str) -> MetricDef:
        try:
            return self._defs[name]
        except KeyError:
            raise UnknownMetric(f"metric {name!r} is not in the project registry") from None

    def parse_key(self, key: str) -> tuple[MetricStage, MetricDef]:
        """Split 'stage/name', resolving the definition and checking the stage."""
        prefix, sep, name = key.partition("/")
        if not sep or prefix not in _PREFIX_STAGE:
            raise UnknownMetric(f"metric key {key!r} must look like 'train/<name>' or 'validation/<name>'")
        definition = self.get(name)
        stage = _PREFIX_STAGE[prefix]
        if definition.stage is not MetricStage.BOTH and definition.stage is not stage:
            raise UnknownMetric(f"metric {name!r} is registered for stage {definition.stage.value}, not {prefix!r}")
        return stage, definition

    def validate_run_metrics(self, metrics: Mapping[str, float]) -> None:
        """Record-time gate: every key registered, every value finite."""
        for key, value in metrics.items():
            self.parse_key(key)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                raise NonFiniteMetric(f"metric {key!r} has non-finite value {value!r}")


def register_metric(registry: MetricRegistry, definition: MetricDef) -> MetricRegistry:
    return registry.register(definition)


def metrics_to_mapping(values: Iterable[MetricValue]) -> dict[str, float]:
    """Serialize MetricValues to the {'stage/name': value} run-record form."""
    out: dict[str, float] = {}
    for v in values:
        if v.key() in out:
            raise DuplicateMetric(f"metric {v.key()!r} recorded twice")
        out[v.key()] = float(v.value)
    return out


def compute_classification_metrics(
    predicted_labels: Sequence[int],
    true_labels: Sequence[int],
    mean_loss: float,
    stage: MetricStage = MetricStage.TRAIN,
) -> list[MetricValue]:
    """Accuracy (match fraction) and cross_entropy (the given mean loss)."""
    n = len(predicted_labels)
    if n != len(true_labels):
        raise LengthMismatch(f"{n} predictions vs {len(true_labels)} labels")
    if n == 0:
        raise EmptyInput("no predictions to score")
    if any(p < 0 for p in predicted_labels) or any(t < 0 for t in true_labels):
        raise ValueError("labels must be non-negative")
    matches = sum(1 for p, t in zip(predicted_labels, true_labels) if p == t)
    return [
        MetricValue(name="accuracy", stage=stage, value=matches / n),
        MetricValue(name="cross_entropy", stage=stage, value=float(mean_loss)),
    ]


def compare_runs(runs: Sequence, metric: str, registry: MetricRegistry) -> list[tuple[str, float]]:
    """Order runs best-first on one metric; ties break on run_id ascending.

    Runs that never recorded the metric are omitted. `runs` is any
    sequence of objects with .run_id and .metrics (RunRecord-shaped).
    """
    _, definition = registry.parse_key(metric)
    present = [(r.run_id, float(r.metrics[metric])) for r in runs if metric in r.metrics]
    if definition.direction is Direction.HIGHER_IS_BETTER:
        return sorted(present, key=lambda rv: (-rv[1], rv[0]))
    return sorted(present, key=lambda rv: (rv[1], rv[0]))
