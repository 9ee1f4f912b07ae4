"""Robot task wire protocol and a discrete-state execution simulator.

Approved tasks travel as rosbridge-style JSON frames:

    {"op":"publish","topic":"/hrc/task","msg":{"action":"pick_place",
     "target_id":504,"destination_id":606,"session":"..."}}

``encode`` emits exactly this key order with compact separators so the
frame is byte-stable for golden comparisons; ``decode`` parses strictly
(wrong op or topic is an error, unknown ``msg`` fields are ignored for
forward compatibility).

The simulator replaces motion planning with a fixed phase sequence per
task: accepted, picking, placing, then done (or failed when fault
injection is armed).  One arm, FIFO: a task dispatched while another is
running is queued, never dropped, and its first event follows the
previous task's terminal event.  Progress is delivered through an event
callback; the optional TCP transport speaks the same frames,
newline-delimited.
"""

from __future__ import annotations

import json
import socketserver
import threading
import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

from .dialogue import TaskCommand

TASK_TOPIC = "/hrc/task"
EVENT_TOPIC = "/hrc/event"


class WireError(Exception):
    pass


class MalformedFrameError(WireError):
    pass


class WrongOperationError(WireError):
    pass


class MissingFieldError(WireError):
    pass


def encode(task: TaskCommand) -> str:
    """Canonical wire frame for a task; byte-stable key order."""
    frame = {
        "op": "publish",
        "topic": TASK_TOPIC,
        "msg": {
            "action": task.action,
            "target_id": task.target_id,
            "destination_id": task.destination_id,
            "session": task.session,
        },
    }
    return json.dumps(frame, separators=(",", ":"))


def decode(frame) -> TaskCommand:
    """Strictly parse a task frame (str or already-parsed dict)."""
    if isinstance(frame, (str, bytes)):
        try:
            frame = json.loads(frame)
        except json.JSONDecodeError as exc:
            raise MalformedFrameError(f"invalid JSON frame: {exc}") from exc
    if not isinstance(frame, dict):
        raise MalformedFrameError("frame must be a JSON object")
    if frame.get("op") != "publish":
        raise WrongOperationError(f"unsupported op {frame.get('op')!r}")
    if frame.get("topic") != TASK_TOPIC:
        raise WrongOperationError(f"unsupported topic {frame.get('topic')!r}")
    msg = frame.get("msg")
    if not isinstance(msg, dict):
        raise MissingFieldError("frame has no msg object")
    for name in ("action", "target_id", "destination_id", "session"):
        if name not in msg:
            raise MissingFieldError(f"msg lacks required field {name!r}")
    if msg["action"] != "pick_place":
        raise WrongOperationError(f"unsupported action {msg['action']!r}")
    target, destination = msg["target_id"], msg["destination_id"]
    if not all(
        isinstance(v, int) and not isinstance(v, bool) for v in (target, destination)
    ):
        raise MalformedFrameError("target_id and destination_id must be integers")
    if not isinstance(msg["session"], str):
        raise MalformedFrameError("session must be a string")
    return TaskCommand(
        target_id=target, destination_id=destination, session=msg["session"]
    )


class Phase(Enum):
    ACCEPTED = "accepted"
    PICKING = "picking"
    PLACING = "placing"
    DONE = "done"
    FAILED = "failed"


TERMINAL_PHASES = (Phase.DONE, Phase.FAILED)


@dataclass(frozen=True)
class RobotEvent:
    phase: Phase
    task: TaskCommand
    sequence: int
    detail: str = ""

    def to_frame(self) -> dict:
        return {
            "op": "publish",
            "topic": EVENT_TOPIC,
            "msg": {
                "phase": self.phase.value,
                "target_id": self.task.target_id,
                "destination_id": self.task.destination_id,
                "session": self.task.session,
                "sequence": self.sequence,
                "detail": self.detail,
            },
        }


EventSink = Callable[[RobotEvent], None]


class RobotSimulator:
    """Single-arm FIFO executor emitting phase events.

    ``phase_delay`` seconds pass between phases (0 keeps tests instant).
    ``inject_fault`` turns the terminal phase of subsequent tasks into
    FAILED so rollback paths can be exercised.
    """

    def __init__(
        self,
        on_event: Optional[EventSink] = None,
        phase_delay: float = 0.0,
        inject_fault: bool = False,
    ):
        self.on_event = on_event
        self.phase_delay = phase_delay
        self.inject_fault = inject_fault
        self._queue: list[TaskCommand] = []
        self._sequence = 0
        self._draining = False
        self._lock = threading.RLock()

    def _emit(self, phase: Phase, task: TaskCommand, detail: str = "") -> RobotEvent:
        with self._lock:
            self._sequence += 1
            event = RobotEvent(phase=phase, task=task, sequence=self._sequence, detail=detail)
        if self.on_event is not None:
            self.on_event(event)
        return event

    def submit(self, task: TaskCommand) -> list[RobotEvent]:
        """Queue a task and run the queue to exhaustion.

        Returns the events emitted during this call (several tasks' worth
        when earlier submissions were queued by a reentrant dispatch).
        """
        with self._lock:
            self._queue.append(task)
            if self._draining:
                return []
            self._draining = True
        emitted: list[RobotEvent] = []
        try:
            while True:
                with self._lock:
                    if not self._queue:
                        self._draining = False
                        return emitted
                    current = self._queue.pop(0)
                emitted.extend(self._run_one(current))
        except BaseException:
            with self._lock:
                self._draining = False
            raise

    def _run_one(self, task: TaskCommand) -> list[RobotEvent]:
        events = [self._emit(Phase.ACCEPTED, task, "task accepted")]
        for phase, detail in (
            (Phase.PICKING, f"picking up panel {task.target_id}"),
            (Phase.PLACING, f"placing on stud {task.destination_id}"),
        ):
            if self.phase_delay > 0:
                time.sleep(self.phase_delay)
            events.append(self._emit(phase, task, detail))
        if self.phase_delay > 0:
            time.sleep(self.phase_delay)
        if self.inject_fault:
            events.append(self._emit(Phase.FAILED, task, "injected fault"))
        else:
            events.append(self._emit(Phase.DONE, task, "panel installed"))
        return events


def execute_task(
    session, simulator: RobotSimulator, task: TaskCommand
) -> list[RobotEvent]:
    """Run a task and feed its outcome back into the dialogue session."""
    events = simulator.submit(task)
    for event in events:
        if event.task == task and event.phase in TERMINAL_PHASES:
            session.complete(event.phase is Phase.DONE, detail=event.detail)
    return events


class _RobotTCPHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        for raw in self.rfile:
            line = raw.decode("utf-8").strip()
            if not line:
                continue
            try:
                task = decode(line)
            except WireError as exc:
                status = {"op": "status", "level": "error", "msg": str(exc)}
                self.wfile.write((json.dumps(status) + "\n").encode("utf-8"))
                continue
            # One task at a time across connections, so every connection
            # receives exactly its own task's events.
            with self.server.dispatch_lock:  # type: ignore[attr-defined]
                events = self.server.simulator.submit(task)  # type: ignore[attr-defined]
            for event in events:
                frame = json.dumps(event.to_frame(), separators=(",", ":"))
                self.wfile.write((frame + "\n").encode("utf-8"))
            self.wfile.flush()


class RobotServer(socketserver.ThreadingTCPServer):
    """Standalone simulator speaking newline-delimited task/event frames."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], simulator: RobotSimulator):
        super().__init__(address, _RobotTCPHandler)
        self.simulator = simulator
        self.dispatch_lock = threading.Lock()
