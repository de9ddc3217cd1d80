"""Filesystem run store.

Layout (all text files UTF-8 with LF endings):

    <root>/project.json            manifest: name, step order, metric registry
    <root>/steps/<name>/state      single line: current StepState token
    <root>/steps/<name>/runs/<run_id>.json
    <root>/events.jsonl            append-only event log
    <root>/artifacts/<run_id>/     per-run outputs (batch dumps etc.)

Every write goes through temp-file-plus-rename, so concurrent readers
always see a complete file and an interrupted process never loses
completed runs.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path

from .errors import CorruptStore, StoreError
from .events import JsonlEventLogger
from .metrics import Direction
from .project import ProjectManifest, RunRecord
from .staleness import StepState

_STATE_TOKENS = {s.value: s for s in StepState}


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.parent / f".{path.name}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _dump_json(payload: dict) -> str:
    # sorted keys -> byte-stable files, friendly to diffing
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class RunStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    # ---- paths ----------------------------------------------------------

    @property
    def project_path(self) -> Path:
        return self.root / "project.json"

    @property
    def steps_dir(self) -> Path:
        return self.root / "steps"

    @property
    def events_path(self) -> Path:
        return self.root / "events.jsonl"

    @property
    def artifacts_root(self) -> Path:
        return self.root / "artifacts"

    def runs_dir(self, step_name: str) -> Path:
        return self.steps_dir / step_name / "runs"

    def state_path(self, step_name: str) -> Path:
        return self.steps_dir / step_name / "state"

    def exists(self) -> bool:
        return self.project_path.is_file()

    # ---- manifest / state ------------------------------------------------

    def initialize(self, manifest: ProjectManifest) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.write_manifest(manifest)
        for step in manifest.steps:
            if not self.state_path(step.name).exists():
                self.write_state(step.name, StepState.NOT_STARTED)

    def write_manifest(self, manifest: ProjectManifest) -> None:
        atomic_write_text(self.project_path, _dump_json(manifest.to_json_dict()))

    def read_manifest(self) -> ProjectManifest:
        if not self.project_path.is_file():
            raise CorruptStore(f"{self.project_path}: missing manifest file")
        try:
            payload = json.loads(self.project_path.read_text(encoding="utf-8"))
            return ProjectManifest.from_json_dict(payload, store_root=self.root)
        except json.JSONDecodeError as exc:
            raise CorruptStore(f"{self.project_path}: line {exc.lineno}: {exc.msg}") from None
        except (KeyError, ValueError, TypeError) as exc:
            raise CorruptStore(f"{self.project_path}: malformed manifest: {exc}") from None

    def write_state(self, step_name: str, state: StepState) -> None:
        atomic_write_text(self.state_path(step_name), state.value + "\n")

    def read_state(self, step_name: str) -> StepState:
        path = self.state_path(step_name)
        if not path.exists():
            return StepState.NOT_STARTED
        token = path.read_text(encoding="utf-8").strip()
        if token not in _STATE_TOKENS:
            raise CorruptStore(f"{path}: unknown state token {token!r}")
        return _STATE_TOKENS[token]

    # ---- runs -------------------------------------------------------------

    def count_runs(self) -> int:
        if not self.steps_dir.is_dir():
            return 0
        return sum(1 for _ in self.steps_dir.glob("*/runs/*.json"))

    def next_run_id(self, now: datetime | None = None) -> str:
        """UTC timestamp plus a 4-digit monotone counter; sorts by creation."""
        now = now or datetime.now(timezone.utc)
        counter = self.count_runs() + 1
        if counter > 9999:
            raise StoreError("run counter exhausted (9999 runs per store)")
        return now.strftime("%Y%m%dT%H%M%SZ") + f"{counter:04d}"

    def write_run(self, record: RunRecord) -> Path:
        path = self.runs_dir(record.step_name) / f"{record.run_id}.json"
        atomic_write_text(path, _dump_json(record.to_json_dict()))
        return path

    def _read_run_file(self, path: Path) -> RunRecord:
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptStore(f"{path}: line {exc.lineno}: {exc.msg}") from None
        try:
            return RunRecord.from_json_dict(payload)
        except (KeyError, ValueError, TypeError) as exc:
            raise CorruptStore(f"{path}: malformed run record: {exc}") from None

    def runs_for_step(self, step_name: str) -> list[RunRecord]:
        """All persisted runs of one step, oldest first."""
        directory = self.runs_dir(step_name)
        if not directory.is_dir():
            return []
        return [self._read_run_file(p) for p in sorted(directory.glob("*.json"))]

    def latest_run(self, step_name: str) -> RunRecord | None:
        runs = self.runs_for_step(step_name)
        return runs[-1] if runs else None

    def all_runs(self) -> list[RunRecord]:
        """Every run in the store, ordered by run_id."""
        if not self.steps_dir.is_dir():
            return []
        return sorted(
            (self._read_run_file(p) for p in self.steps_dir.glob("*/runs/*.json")),
            key=lambda r: r.run_id,
        )

    def find_run(self, run_id: str) -> RunRecord | None:
        for record in self.all_runs():
            if record.run_id == run_id:
                return record
        return None

    def best_passed_value(self, step_name: str, metric: str, direction: Direction) -> float | None:
        """Direction-aware best metric value over the step's Passed runs."""
        values = [
            float(r.metrics[metric])
            for r in self.runs_for_step(step_name)
            if r.final_state is StepState.PASSED and metric in r.metrics
        ]
        if not values:
            return None
        return max(values) if direction is Direction.HIGHER_IS_BETTER else min(values)

    # ---- artifacts / events -----------------------------------------------

    def artifacts_dir(self, run_id: str) -> Path:
        path = self.artifacts_root / run_id
        path.mkdir(parents=True, exist_ok=True)
        return path

    def event_logger(self) -> JsonlEventLogger:
        return JsonlEventLogger(self.events_path)


def save_store(manifest: ProjectManifest) -> RunStore:
    """Persist the manifest layout at manifest.store_root."""
    store = RunStore(manifest.store_root)
    store.initialize(manifest)
    return store


def load_store(store_root: str | Path) -> tuple[ProjectManifest, list[RunRecord]]:
    """Read back a manifest and every persisted run record."""
    store = RunStore(store_root)
    manifest = store.read_manifest()
    records: list[RunRecord] = []
    for step in manifest.steps:
        records.extend(store.runs_for_step(step.name))
    records.sort(key=lambda r: r.run_id)
    return manifest, records
