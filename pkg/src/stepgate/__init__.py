"""stepgate: staged experiment pipelines with gated checks.

A project is an ordered sequence of steps, each validated by boolean
checks over a shared metric registry. Runs persist to a filesystem
store, watched-source fingerprints flag stale results, and a read-only
dashboard serves the history.
"""

from . import backend, errors
from .checks import CheckKind, CheckSpec, evaluate_check
from .core import Executor, Project, RunContext
from .decorators import BatchSaver, Decorator, MetricSink, Timer, apply_decorators, wrap_stage
from .events import EventSink, JsonlEventLogger, Level, LogEvent, NullEventLogger, read_events
from .fingerprint import Fingerprint, fingerprint_sources, normalize_newlines
from .metrics import (
    Direction,
    MetricDef,
    MetricRegistry,
    MetricStage,
    MetricValue,
    compare_runs,
    compute_classification_metrics,
    metrics_to_mapping,
    register_metric,
)
from .project import (
    CheckOutcome,
    ProjectManifest,
    RunRecord,
    StepDescriptor,
    StepKind,
    WatchedSource,
    canonical_run_dict,
)
from .staleness import StepState, apply_staleness
from .store import RunStore, load_store, save_store

__version__ = "0.1.0"

__all__ = [
    "BatchSaver",
    "CheckKind",
    "CheckOutcome",
    "CheckSpec",
    "Decorator",
    "Direction",
    "EventSink",
    "Executor",
    "Fingerprint",
    "JsonlEventLogger",
    "Level",
    "LogEvent",
    "MetricDef",
    "MetricRegistry",
    "MetricSink",
    "MetricStage",
    "MetricValue",
    "NullEventLogger",
    "Project",
    "ProjectManifest",
    "RunContext",
    "RunRecord",
    "RunStore",
    "StepDescriptor",
    "StepKind",
    "StepState",
    "Timer",
    "WatchedSource",
    "apply_decorators",
    "apply_staleness",
    "backend",
    "canonical_run_dict",
    "compare_runs",
    "compute_classification_metrics",
    "errors",
    "evaluate_check",
    "fingerprint_sources",
    "load_store",
    "metrics_to_mapping",
    "normalize_newlines",
    "read_events",
    "register_metric",
    "save_store",
    "wrap_stage",
]
