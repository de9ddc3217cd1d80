"""Read-only view models shared by the CLI status table and the HTTP API."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Project
from .staleness import StepState


@dataclass(frozen=True)
class StepView:
    name: str
    kind: str
    state: str  # StepState token, overlay applied
    latest_run_id: str | None
    stale: bool
    checks_passed: int
    checks_total: int

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "state": self.state,
            "latest_run_id": self.latest_run_id,
            "stale": self.stale,
            "check_summary": {"passed": self.checks_passed, "total": self.checks_total},
        }


def step_views(project: Project) -> list[StepView]:
    states = project.step_states()
    views = []
    for descriptor in project.manifest.steps:
        latest = project.store.latest_run(descriptor.name)
        state = states[descriptor.name]
        views.append(StepView(
            name=descriptor.name,
            kind=descriptor.kind.value,
            state=state.value,
            latest_run_id=latest.run_id if latest else None,
            stale=state is StepState.STALE,
            checks_passed=sum(1 for o in latest.check_outcomes if o.passed) if latest else 0,
            checks_total=len(latest.check_outcomes) if latest else 0,
        ))
    return views
