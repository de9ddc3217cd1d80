"""Domain types: steps, run records, and the project manifest."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

from .checks import CheckSpec
from .errors import EmptyCheckList, WatchedSourceMissing
from .fingerprint import Fingerprint, fingerprint_sources
from .metrics import MetricDef, MetricRegistry
from .staleness import StepState

_IDENT = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

SCHEMA_VERSION = 1

_CONFIG_SCALARS = (str, int, float, bool)


class StepKind(str, Enum):
    ANALYZE_DATA = "AnalyzeData"
    CHECK_LOSS_ON_INIT = "CheckLossOnInit"
    OVERFIT_ONE_BATCH = "OverfitOneBatch"
    REGULARIZE = "Regularize"
    TRANSFER_LEARNING = "TransferLearning"
    CUSTOM = "Custom"


def _require_ident(name: str, what: str) -> str:
    if not _IDENT.match(name or ""):
        raise ValueError(f"{what} {name!r} must match {_IDENT.pattern}")
    return name


@dataclass(frozen=True)
class WatchedSource:
    """A (label, content reference) pair; content is a file or inline text.

    Relative paths resolve against the store root, keeping stores
    relocatable.
    """

    label: str
    path: str | None = None
    content: str | None = None

    def __post_init__(self):
        if (self.path is None) == (self.content is None):
            raise ValueError(f"watched source {self.label!r} needs exactly one of path or content")

    def resolve(self, base_dir: Path) -> tuple[str, bytes]:
        if self.content is not None:
            return self.label, self.content.encode("utf-8")
        p = Path(self.path)
        if not p.is_absolute():
            p = base_dir / p
        try:
            return self.label, p.read_bytes()
        except OSError as exc:
            raise WatchedSourceMissing(f"cannot read watched source {self.label!r} at {p}: {exc}") from None

    def to_json_dict(self) -> dict:
        return {"label": self.label, "path": self.path, "content": self.content}

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "WatchedSource":
        return cls(label=d["label"], path=d.get("path"), content=d.get("content"))


@dataclass(frozen=True)
class StepDescriptor:
    name: str
    kind: StepKind
    checks: tuple[CheckSpec, ...]
    config: Mapping[str, object] = field(default_factory=dict)
    watched_sources: tuple[WatchedSource, ...] = ()

    def __post_init__(self):
        _require_ident(self.name, "step name")
        object.__setattr__(self, "checks", tuple(self.checks))
        object.__setattr__(self, "watched_sources", tuple(self.watched_sources))
        object.__setattr__(self, "config", dict(self.config))
        if not self.checks:
            raise EmptyCheckList(f"step {self.name!r} declares no checks; every step needs validation")
        for k, v in self.config.items():
            if not isinstance(v, _CONFIG_SCALARS):
                raise ValueError(f"step config must be flat scalars; {k!r} is {type(v).__name__}")

    def current_fingerprint(self, base_dir: Path) -> Fingerprint:
        return fingerprint_sources([ws.resolve(base_dir) for ws in self.watched_sources])

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "config": dict(self.config),
            "checks": [c.to_json_dict() for c in self.checks],
            "watched_sources": [w.to_json_dict() for w in self.watched_sources],
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "StepDescriptor":
        return cls(
            name=d["name"],
            kind=StepKind(d["kind"]),
            checks=tuple(CheckSpec.from_json_dict(c) for c in d["checks"]),
            config=d.get("config", {}),
            watched_sources=tuple(WatchedSource.from_json_dict(w) for w in d.get("watched_sources", [])),
        )


@dataclass(frozen=True)
class CheckOutcome:
    check: str
    passed: bool
    message: str

    def to_json_dict(self) -> dict:
        return {"check": self.check, "passed": self.passed, "message": self.message}

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "CheckOutcome":
        return cls(check=d["check"], passed=bool(d["passed"]), message=d["message"])


@dataclass(frozen=True)
class RunRecord:
    """One execution of one step; final_state is Passed iff every check passed."""

    run_id: str
    step_name: str
    started_at: str
    finished_at: str
    seed: int
    config: Mapping[str, object]
    metrics: Mapping[str, float]
    fingerprint: Fingerprint
    check_outcomes: tuple[CheckOutcome, ...]
    final_state: StepState
    forced: bool = False

    def __post_init__(self):
        object.__setattr__(self, "config", dict(self.config))
        object.__setattr__(self, "metrics", dict(self.metrics))
        object.__setattr__(self, "check_outcomes", tuple(self.check_outcomes))
        if self.final_state not in (StepState.PASSED, StepState.FAILED):
            raise ValueError(f"final_state must be Passed or Failed, got {self.final_state}")
        all_pass = all(o.passed for o in self.check_outcomes)
        if (self.final_state is StepState.PASSED) != all_pass:
            raise ValueError("final_state must be Passed exactly when every check outcome passed")

    def to_json_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "step_name": self.step_name,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "seed": self.seed,
            "config": dict(self.config),
            "metrics": dict(self.metrics),
            "fingerprint": self.fingerprint.to_json_dict(),
            "check_outcomes": [o.to_json_dict() for o in self.check_outcomes],
            "final_state": self.final_state.value,
            "forced": self.forced,
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "RunRecord":
        return cls(
            run_id=d["run_id"],
            step_name=d["step_name"],
            started_at=d["started_at"],
            finished_at=d["finished_at"],
            seed=int(d["seed"]),
            config=d["config"],
            metrics=d["metrics"],
            fingerprint=Fingerprint.from_json_dict(d["fingerprint"]),
            check_outcomes=tuple(CheckOutcome.from_json_dict(o) for o in d["check_outcomes"]),
            final_state=StepState(d["final_state"]),
            forced=bool(d.get("forced", False)),
        )


def canonical_run_dict(record: "RunRecord | Mapping") -> dict:
    """Record content with run identity and timestamps stripped.

    This is the comparison form for determinism checks: two runs of the
    same step with the same seed must agree on everything left.
    """
    d = record.to_json_dict() if isinstance(record, RunRecord) else dict(record)
    for volatile in ("run_id", "started_at", "finished_at"):
        d.pop(volatile, None)
    return d


@dataclass
class ProjectManifest:
    """Ordered steps, the metric registry, and where the store lives."""

    name: str
    steps: list[StepDescriptor]
    metric_registry: MetricRegistry
    store_root: Path

    def __post_init__(self):
        _require_ident(self.name, "project name")
        self.store_root = Path(self.store_root)
        names = [s.name for s in self.steps]
        if len(set(names)) != len(names):
            raise ValueError(f"step names must be unique, got {names}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ProjectManifest)
            and self.name == other.name
            and self.steps == other.steps
            and self.metric_registry == other.metric_registry
            and self.store_root == other.store_root
        )

    def step_names(self) -> list[str]:
        return [s.name for s in self.steps]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "metric_registry": [m.to_json_dict() for m in self.metric_registry.defs()],
            "steps": [s.to_json_dict() for s in self.steps],
        }

    @classmethod
    def from_json_dict(cls, d: Mapping, store_root: Path) -> "ProjectManifest":
        return cls(
            name=d["name"],
            steps=[StepDescriptor.from_json_dict(s) for s in d["steps"]],
            metric_registry=MetricRegistry(MetricDef.from_json_dict(m) for m in d["metric_registry"]),
            store_root=Path(store_root),
        )
