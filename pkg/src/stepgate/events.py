"""Structured event log: one JSON object per line, flushed per event.

The JsonlEventLogger is the filesystem sink; NullEventLogger is the
stand-in for remote experiment-tracking clients, which share the same
interface but are out of scope here.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Mapping


class Level(str, Enum):
    INFO = "Info"
    WARN = "Warn"
    ERROR = "Error"


_SCALARS = (str, int, float, bool, type(None))


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class LogEvent:
    timestamp: str  # UTC ISO-8601
    level: Level
    message: str
    step: str = ""
    run_id: str = ""
    data: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for k, v in self.data.items():
            if not isinstance(v, _SCALARS):
                raise ValueError(f"event data must be flat scalars; {k!r} is {type(v).__name__}")

    def to_json_line(self) -> str:
        payload = {
            "timestamp": self.timestamp,
            "level": self.level.value,
            "message": self.message,
            "step": self.step,
            "run_id": self.run_id,
            "data": dict(self.data),
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json_line(cls, line: str) -> "LogEvent":
        d = json.loads(line)
        return cls(
            timestamp=d["timestamp"],
            level=Level(d["level"]),
            message=d["message"],
            step=d.get("step", ""),
            run_id=d.get("run_id", ""),
            data=d.get("data", {}),
        )


def event(level: Level, message: str, step: str = "", run_id: str = "",
          data: Mapping[str, object] | None = None) -> LogEvent:
    return LogEvent(timestamp=utc_now_iso(), level=level, message=message,
                    step=step, run_id=run_id, data=data or {})


class EventSink:
    """Logger interface all integrations implement."""

    def append(self, evt: LogEvent) -> None:
        raise NotImplementedError

    def close(self) -> None:
        pass


class NullEventLogger(EventSink):
    def append(self, evt: LogEvent) -> None:
        pass


class JsonlEventLogger(EventSink):
    """Append-only events.jsonl writer; one handle, fsync per event."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._handle = None

    def append(self, evt: LogEvent) -> None:
        if self._handle is None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = open(self.path, "a", encoding="utf-8")
        self._handle.write(evt.to_json_line() + "\n")
        self._handle.flush()
        os.fsync(self._handle.fileno())

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def __enter__(self) -> "JsonlEventLogger":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_events(path: str | Path) -> list[LogEvent]:
    out = []
    p = Path(path)
    if not p.exists():
        return out
    with open(p, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(LogEvent.from_json_line(line))
    return out
