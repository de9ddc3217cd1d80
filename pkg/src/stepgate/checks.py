"""Boolean validators over a run's metrics.

A check is a pure pass/fail decision plus a message naming the metric,
the observed value and the bound. A missing metric makes a check fail
with a message; only a metric absent from the registry is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Protocol

from .errors import UnknownMetricInSpec
from .metrics import Direction, MetricRegistry
from .errors import UnknownMetric


class CheckKind(str, Enum):
    EXISTS = "Exists"
    LESS_THAN = "LessThan"
    GREATER_THAN = "GreaterThan"
    CLOSE_TO = "CloseTo"
    IMPROVED_OVER = "ImprovedOver"


_NEEDS_VALUE = {CheckKind.LESS_THAN, CheckKind.GREATER_THAN, CheckKind.CLOSE_TO}


@dataclass(frozen=True)
class CheckSpec:
    kind: CheckKind
    metric: str  # stage-prefixed key, e.g. "train/cross_entropy"
    value: float | None = None  # threshold or target; unused for Exists/ImprovedOver
    tol: float = 0.0  # CloseTo only
    baseline: str | None = None  # ImprovedOver only

    def __post_init__(self):
        if not self.metric:
            raise ValueError("check metric must be non-empty")
        if self.tol < 0:
            raise ValueError("tolerance must be >= 0")
        if self.kind in _NEEDS_VALUE and self.value is None:
            raise ValueError(f"{self.kind.value} check needs a threshold/target value")
        if self.kind is CheckKind.IMPROVED_OVER and not self.baseline:
            raise ValueError("ImprovedOver check needs a baseline step name")

    def describe(self) -> str:
        if self.kind is CheckKind.EXISTS:
            return f"Exists({self.metric})"
        if self.kind is CheckKind.LESS_THAN:
            return f"LessThan({self.metric}, {self.value})"
        if self.kind is CheckKind.GREATER_THAN:
            return f"GreaterThan({self.metric}, {self.value})"
        if self.kind is CheckKind.CLOSE_TO:
            return f"CloseTo({self.metric}, {self.value}, tol={self.tol})"
        return f"ImprovedOver({self.metric}, baseline={self.baseline})"

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "metric": self.metric,
            "value": self.value,
            "tol": self.tol,
            "baseline": self.baseline,
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "CheckSpec":
        return cls(
            kind=CheckKind(d["kind"]),
            metric=d["metric"],
            value=d.get("value"),
            tol=d.get("tol") or 0.0,
            baseline=d.get("baseline"),
        )


class BaselineLookup(Protocol):
    """Read access to prior runs, reduced to what ImprovedOver needs."""

    def best_passed_value(self, step_name: str, metric: str, direction: Direction) -> float | None: ...


def evaluate_check(
    spec: CheckSpec,
    run_metrics: Mapping[str, float],
    registry: MetricRegistry,
    history: BaselineLookup | None = None,
) -> tuple[bool, str]:
    """Deterministic pass/fail plus a human-readable message.

    Raises UnknownMetricInSpec when the check references a metric the
    registry does not know; every other condition is a regular fail.
    """
    try:
        _, definition = registry.parse_key(spec.metric)
    except UnknownMetric as exc:
        raise UnknownMetricInSpec(str(exc)) from None

    if spec.kind is CheckKind.EXISTS:
        if spec.metric in run_metrics:
            return True, f"{spec.metric} recorded ({run_metrics[spec.metric]!r})"
        return False, f"{spec.metric} missing from run metrics"

    if spec.metric not in run_metrics:
        return False, f"{spec.metric} missing from run metrics"
    observed = float(run_metrics[spec.metric])

    if spec.kind is CheckKind.LESS_THAN:
        if observed < spec.value:
            return True, f"{spec.metric}={observed!r} < {spec.value!r}"
        return False, f"{spec.metric}={observed!r} is not < {spec.value!r}"

    if spec.kind is CheckKind.GREATER_THAN:
        if observed > spec.value:
            return True, f"{spec.metric}={observed!r} > {spec.value!r}"
        return False, f"{spec.metric}={observed!r} is not > {spec.value!r}"

    if spec.kind is CheckKind.CLOSE_TO:
        delta = abs(observed - spec.value)
        if delta <= spec.tol:
            return True, f"{spec.metric}={observed!r} within {spec.tol!r} of {spec.value!r} (|delta|={delta!r})"
        return False, f"{spec.metric}={observed!r} not within {spec.tol!r} of {spec.value!r} (|delta|={delta!r})"

    # ImprovedOver: strict, direction-aware, against the best Passed baseline run
    if history is None:
        return False, f"no run history available to find baseline step {spec.baseline!r}"
    best = history.best_passed_value(spec.baseline, spec.metric, definition.direction)
    if best is None:
        return False, f"no Passed run of step {spec.baseline!r} records {spec.metric}"
    if definition.direction is Direction.HIGHER_IS_BETTER:
        ok = observed > best
        rel = ">" if ok else "is not >"
    else:
        ok = observed < best
        rel = "<" if ok else "is not <"
    return ok, f"{spec.metric}={observed!r} {rel} best {spec.baseline!r} value {best!r}"


def validate_spec_metrics(specs: "list[CheckSpec] | tuple[CheckSpec, ...]", registry: MetricRegistry) -> None:
    """Raise UnknownMetricInSpec for any check naming an unregistered metric."""
    for spec in specs:
        try:
            registry.parse_key(spec.metric)
        except UnknownMetric as exc:
            raise UnknownMetricInSpec(str(exc)) from None
