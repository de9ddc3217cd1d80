"""Project container and the gated step-execution engine.

One Project owns one store and is the single writer for it. Steps run
strictly in registration order: a step may only run once every earlier
step is Passed (staleness counts against that), and run_until stops at
the first step whose checks fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .checks import evaluate_check, validate_spec_metrics
from .decorators import Decorator, MetricSink
from .errors import DuplicateMetric, DuplicateStepName, GateViolation, UnknownStep
from .events import EventSink, Level, event, utc_now_iso
from .fingerprint import Fingerprint
from .metrics import MetricRegistry
from .project import CheckOutcome, ProjectManifest, RunRecord, StepDescriptor
from .staleness import StepState, apply_staleness
from .store import RunStore


@dataclass
class RunContext:
    """Everything an executor may touch while producing run metrics."""

    step: StepDescriptor
    config: dict
    seed: int
    registry: MetricRegistry
    history: RunStore
    artifacts_dir: Path
    events: EventSink
    decorators: tuple[Decorator, ...] = ()


Executor = Callable[[RunContext], Mapping[str, float]]


class Project:
    def __init__(self, manifest: ProjectManifest, store: RunStore):
        self.manifest = manifest
        self.store = store
        self._events: EventSink | None = None

    # ---- lifecycle --------------------------------------------------------

    @classmethod
    def create(
        cls,
        name: str,
        store_root: str | Path,
        registry: MetricRegistry,
        steps: Iterable[StepDescriptor] = (),
    ) -> "Project":
        manifest = ProjectManifest(name=name, steps=[], metric_registry=registry, store_root=Path(store_root))
        project = cls(manifest, RunStore(manifest.store_root))
        project.store.initialize(manifest)
        for descriptor in steps:
            project.add_step(descriptor)
        return project

    @classmethod
    def load(cls, store_root: str | Path) -> "Project":
        store = RunStore(store_root)
        return cls(store.read_manifest(), store)

    @property
    def registry(self) -> MetricRegistry:
        return self.manifest.metric_registry

    @property
    def events(self) -> EventSink:
        if self._events is None:
            self._events = self.store.event_logger()
        return self._events

    def close(self) -> None:
        if self._events is not None:
            self._events.close()
            self._events = None

    def __enter__(self) -> "Project":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # ---- step registry ----------------------------------------------------

    def step(self, name: str) -> StepDescriptor:
        for s in self.manifest.steps:
            if s.name == name:
                return s
        raise UnknownStep(f"step {name!r} is not registered (have {self.manifest.step_names()})")

    def add_step(self, descriptor: StepDescriptor) -> ProjectManifest:
        """Append a step at the end of the order and persist the manifest."""
        if descriptor.name in self.manifest.step_names():
            raise DuplicateStepName(f"step {descriptor.name!r} already registered")
        # surfaces UnknownMetricInSpec at registration, not mid-run
        validate_spec_metrics(descriptor.checks, self.registry)
        self.manifest.steps.append(descriptor)
        self.store.write_manifest(self.manifest)
        self.store.write_state(descriptor.name, StepState.NOT_STARTED)
        return self.manifest

    # ---- state views ------------------------------------------------------

    def base_states(self) -> dict[str, StepState]:
        return {s.name: self.store.read_state(s.name) for s in self.manifest.steps}

    def current_fingerprints(self) -> dict[str, Fingerprint]:
        return {s.name: s.current_fingerprint(self.store.root) for s in self.manifest.steps}

    def recorded_fingerprints(self) -> dict[str, Fingerprint | None]:
        out: dict[str, Fingerprint | None] = {}
        for s in self.manifest.steps:
            latest = self.store.latest_run(s.name)
            out[s.name] = latest.fingerprint if latest else None
        return out

    def step_states(self) -> dict[str, StepState]:
        """Latest persisted state per step with the staleness overlay applied."""
        return apply_staleness(self.base_states(), self.recorded_fingerprints(), self.current_fingerprints())

    # ---- execution --------------------------------------------------------

    def _check_gate(self, name: str) -> None:
        states = self.step_states()
        for s in self.manifest.steps:
            if s.name == name:
                return
            if states[s.name] is not StepState.PASSED:
                raise GateViolation(
                    f"cannot run {name!r}: earlier step {s.name!r} is {states[s.name].value}, not Passed"
                )
        raise UnknownStep(f"step {name!r} is not registered")

    def run_step(
        self,
        name: str,
        executor: Executor,
        *,
        seed: int | None = None,
        force: bool = False,
        decorators: Iterable[Decorator] = (),
    ) -> RunRecord:
        """Execute one step, evaluate its checks, persist the outcome.

        Executor and metric-recording errors never escape: they yield a
        Failed record carrying the error message. Only gate violations
        and unknown steps raise.
        """
        descriptor = self.step(name)
        if not force:
            self._check_gate(name)
        run_seed = int(seed if seed is not None else descriptor.config.get("seed", 0))
        decorators = tuple(decorators)

        run_id = self.store.next_run_id()
        started_at = utc_now_iso()
        current_fp = descriptor.current_fingerprint(self.store.root)
        artifacts = self.store.artifacts_dir(run_id)
        sink = MetricSink(artifacts)
        for d in decorators:
            d.bind(sink)

        self.store.write_state(name, StepState.RUNNING)
        self.events.append(event(Level.INFO, "run started", step=name, run_id=run_id,
                                 data={"seed": run_seed, "forced": force}))

        ctx = RunContext(
            step=descriptor,
            config=dict(descriptor.config),
            seed=run_seed,
            registry=self.registry,
            history=self.store,
            artifacts_dir=artifacts,
            events=self.events,
            decorators=decorators,
        )

        metrics: dict[str, float] = {}
        outcomes: list[CheckOutcome] = []
        try:
            produced = executor(ctx)
            metrics = {k: float(v) for k, v in dict(produced).items()}
            for d in decorators:
                d.finalize(sink)
            for key, value in sink.metrics().items():
                if key in metrics:
                    raise DuplicateMetric(f"decorator metric {key!r} collides with executor metric")
                metrics[key] = value
            self.registry.validate_run_metrics(metrics)
            for spec in descriptor.checks:
                passed, message = evaluate_check(spec, metrics, self.registry, history=self.store)
                outcomes.append(CheckOutcome(spec.describe(), passed, message))
        except Exception as exc:  # recorded as a Failed run, not a crash
            metrics = {}
            outcomes = [CheckOutcome("executor", False, f"{type(exc).__name__}: {exc}")]

        final_state = StepState.PASSED if outcomes and all(o.passed for o in outcomes) else StepState.FAILED
        record = RunRecord(
            run_id=run_id,
            step_name=name,
            started_at=started_at,
            finished_at=utc_now_iso(),
            seed=run_seed,
            config=dict(descriptor.config),
            metrics=metrics,
            fingerprint=current_fp,
            check_outcomes=tuple(outcomes),
            final_state=final_state,
            forced=force,
        )
        self.store.write_run(record)
        self.store.write_state(name, final_state)
        n_passed = sum(1 for o in outcomes if o.passed)
        self.events.append(event(
            Level.INFO if final_state is StepState.PASSED else Level.ERROR,
            "run finished", step=name, run_id=run_id,
            data={"final_state": final_state.value, "checks_passed": n_passed, "checks_total": len(outcomes)},
        ))
        return record

    def run_until(
        self,
        last_step: str,
        executor_for: Callable[[StepDescriptor], Executor],
        *,
        seed: int | None = None,
        decorators: Iterable[Decorator] = (),
    ) -> list[RunRecord]:
        """Run steps in order through last_step, stopping at the first failure.

        Steps already effectively Passed are skipped (a Stale step is not
        Passed and re-runs); later steps stay NotStarted after a failure.
        """
        names = self.manifest.step_names()
        if last_step not in names:
            raise UnknownStep(f"step {last_step!r} is not registered (have {names})")
        records: list[RunRecord] = []
        for descriptor in self.manifest.steps:
            if self.step_states()[descriptor.name] is not StepState.PASSED:
                record = self.run_step(descriptor.name, executor_for(descriptor),
                                       seed=seed, decorators=decorators)
                records.append(record)
                if record.final_state is not StepState.PASSED:
                    break
            if descriptor.name == last_step:
                break
        return records
