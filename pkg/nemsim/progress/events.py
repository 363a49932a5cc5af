"""Progress events for long runs and the stderr line printer."""

import itertools
import logging
import sys
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, TextIO

logger = logging.getLogger(__name__)


class EventType(str, Enum):
    """Types of progress events."""

    RUN_STARTED = "run_started"
    POINT_STARTED = "point_started"
    POINT_FINISHED = "point_finished"
    TROTTER_STEP = "trotter_step"
    CHECK = "check"
    RUN_FINISHED = "run_finished"
    ERROR = "error"

    @property
    def label(self) -> str:
        """Short tag used on stderr lines."""
        return _LABELS.get(self, self.value)


_LABELS = {
    EventType.RUN_STARTED: "start",
    EventType.POINT_STARTED: "point",
    EventType.POINT_FINISHED: "done",
    EventType.TROTTER_STEP: "step",
    EventType.RUN_FINISHED: "finished",
}


@dataclass(frozen=True)
class ProgressEvent:
    """One step of a run, as shown on stderr."""

    id: str
    type: EventType
    timestamp: str
    experiment: str
    message: str = ""
    data: dict[str, Any] = field(default_factory=dict)


Subscriber = Callable[[ProgressEvent], None]


class EventStore:
    """Bounded history of progress events with synchronous subscribers.

    A subscriber that raises is logged and skipped; the run carries on.
    """

    def __init__(self, max_events: int = 500):
        self._events: deque[ProgressEvent] = deque(maxlen=max_events)
        self._subscribers: list[Subscriber] = []
        self._ids = itertools.count(1)

    def add_event(self, event: ProgressEvent) -> None:
        self._events.append(event)
        for subscriber in list(self._subscribers):
            try:
                subscriber(event)
            except Exception:
                logger.exception("progress subscriber %r failed on %s", subscriber, event.id)

    def get_events(self, limit: int = 50) -> list[ProgressEvent]:
        """Newest ``limit`` events, oldest first."""
        return list(self._events)[-limit:]

    def clear(self) -> None:
        self._events.clear()

    def subscribe(self, callback: Subscriber) -> None:
        """Add a subscriber; duplicates are ignored."""
        if callback not in self._subscribers:
            self._subscribers.append(callback)

    def unsubscribe(self, callback: Subscriber) -> None:
        if callback in self._subscribers:
            self._subscribers.remove(callback)

    def next_id(self) -> str:
        return f"evt_{next(self._ids):06d}"


event_store = EventStore()


def _emit(event_type: EventType, experiment: str, message: str, data: dict[str, Any]) -> str:
    event = ProgressEvent(
        id=event_store.next_id(),
        type=event_type,
        timestamp=datetime.now(timezone.utc).isoformat(),
        experiment=experiment,
        message=message,
        data=data,
    )
    event_store.add_event(event)
    return event.id


def capture_run_started(experiment: str, points: int, workers: int) -> str:
    """Capture the start of an experiment run."""
    return _emit(
        EventType.RUN_STARTED,
        experiment,
        f"{points} point(s) on {workers} worker(s)",
        {"points": points, "workers": workers},
    )


def capture_point_started(experiment: str, index: int, point: dict[str, float]) -> str:
    """Capture the start of one sweep point."""
    return _emit(EventType.POINT_STARTED, experiment, _format_point(point), {"index": index, **point})


def capture_point_finished(experiment: str, index: int, total: int) -> str:
    """Capture a finished sweep point."""
    return _emit(
        EventType.POINT_FINISHED,
        experiment,
        f"{index + 1}/{total}",
        {"index": index, "total": total},
    )


def capture_trotter_step(experiment: str, step: int, steps: int, time_us: float) -> str:
    """Capture a Trotter step boundary reached by the integrator."""
    return _emit(
        EventType.TROTTER_STEP,
        experiment,
        f"{step}/{steps} at t={time_us:.3f} us",
        {"step": step, "steps": steps, "time_us": time_us},
    )


def capture_check(name: str, passed: bool, detail: str) -> str:
    """Capture the outcome of an acceptance check."""
    return _emit(
        EventType.CHECK,
        name,
        f"{'PASS' if passed else 'FAIL'} {detail}",
        {"passed": passed},
    )


def capture_run_finished(experiment: str, rows: int, path: str | None) -> str:
    """Capture the end of an experiment run."""
    return _emit(
        EventType.RUN_FINISHED,
        experiment,
        f"{rows} row(s) -> {path or '-'}",
        {"rows": rows, "path": path},
    )


def capture_error(experiment: str, error: BaseException) -> str:
    """Capture a failure."""
    return _emit(
        EventType.ERROR,
        experiment,
        f"{type(error).__name__}: {error}",
        {"error": type(error).__name__},
    )


def _format_point(point: dict[str, float]) -> str:
    return " ".join(f"{key}={value:.6g}" for key, value in sorted(point.items()))


def format_event_for_display(event: ProgressEvent) -> str:
    """One human-readable line for an event."""
    return f"[{event.experiment}] {event.type.label}: {event.message}".rstrip()


class StderrPrinter:
    """Subscriber writing one line per event to a text stream."""

    def __init__(self, stream: TextIO | None = None):
        self.stream = stream

    def __call__(self, event: ProgressEvent) -> None:
        stream = self.stream or sys.stderr
        stream.write(format_event_for_display(event) + "\n")
        stream.flush()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StderrPrinter) and other.stream is self.stream

    def __hash__(self) -> int:
        return hash((StderrPrinter, id(self.stream)))


def install_stderr_printer() -> StderrPrinter:
    """Subscribe a stderr printer to the global store (idempotent)."""
    printer = StderrPrinter()
    event_store.subscribe(printer)
    return printer
