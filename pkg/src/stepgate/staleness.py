"""Staleness overlay: completed steps whose watched sources changed.

Stale is never persisted; it is computed by comparing each step's
current source fingerprint with the one recorded by its latest run.
Only Passed/Failed steps can become Stale, so applying the overlay
twice with the same fingerprints is a no-op the second time.
"""

from __future__ import annotations

from enum import Enum
from typing import Mapping

from .fingerprint import Fingerprint


class StepState(str, Enum):
    NOT_STARTED = "NotStarted"
    RUNNING = "Running"
    PASSED = "Passed"
    FAILED = "Failed"
    STALE = "Stale"


_OVERLAYABLE = (StepState.PASSED, StepState.FAILED)


def apply_staleness(
    states: Mapping[str, StepState],
    recorded: Mapping[str, Fingerprint | None],
    current: Mapping[str, Fingerprint | None],
) -> dict[str, StepState]:
    """Overlay Stale onto Passed/Failed steps whose fingerprint moved.

    `recorded` holds the fingerprint of each step's latest run (None when
    the step never ran); `current` the fingerprint of its sources now.
    """
    out: dict[str, StepState] = {}
    for name, state in states.items():
        rec = recorded.get(name)
        cur = current.get(name)
        if state in _OVERLAYABLE and rec is not None and cur is not None and rec.digest != cur.digest:
            out[name] = StepState.STALE
        else:
            out[name] = state
    return out
