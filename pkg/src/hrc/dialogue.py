"""Session state machine: instruct, confirm, acknowledge, approve, dispatch.

A session walks a fixed loop for every task:

    AWAITING_INSTRUCTION --valid instruction--> AWAITING_CONFIRMATION
    AWAITING_CONFIRMATION --"yes"--> READY_FOR_APPROVAL  (reply "OKAY!!!")
    READY_FOR_APPROVAL --approve()--> DISPATCHING  (task command emitted)
    DISPATCHING --complete(success)--> AWAITING_INSTRUCTION  (scene updated)

Every other reply (clarification, rejection, re-ask) falls back to
AWAITING_INSTRUCTION and clears the pending task.  The only way a task
command leaves the session is the full sequence above; approval is a
separate human action and is never implied by the acknowledgment.

The scene value mutates exactly once per task, inside
``complete(success)``.  Sessions serialize their own operations with a
lock; a remote assistant call parks the session in ASSISTANT_PENDING and
rejects concurrent inputs as busy.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .assistant import AssistantReply, AssistantRequest, ReplyKind
from .fusion import SelectionBatch, SelectionHighlight, compose, record_selection
from .parsing import Action, ParsedIntent, extract_ids, parse_command
from .scene import Scene, SceneIntegrityError, apply_install
from .validation import validate


class SessionState(Enum):
    AWAITING_INSTRUCTION = "awaiting_instruction"
    AWAITING_CONFIRMATION = "awaiting_confirmation"
    READY_FOR_APPROVAL = "ready_for_approval"
    DISPATCHING = "dispatching"
    ASSISTANT_PENDING = "assistant_pending"


@dataclass(frozen=True)
class TaskCommand:
    """An approved pick-and-place order, ready for the wire."""

    target_id: int
    destination_id: int
    session: str
    action: str = "pick_place"


@dataclass(frozen=True)
class TranscriptEntry:
    speaker: str  # "user" | "robot" | "system"
    text: str
    timestamp: float


class SessionError(Exception):
    pass


class SessionBusyError(SessionError):
    """Input arrived while the session is dispatching or waiting on the assistant."""


class SessionStateError(SessionError):
    """The operation is not legal in the session's current state."""


class ExtractionMismatchError(SessionError):
    """The ids re-extracted from the confirmation text disagree with the
    pending task; approval is refused rather than dispatching blind."""


_BUSY_STATES = (SessionState.DISPATCHING, SessionState.ASSISTANT_PENDING)
_CONFIRMABLE_STATES = (
    SessionState.AWAITING_CONFIRMATION,
    SessionState.READY_FOR_APPROVAL,
)


class DialogueSession:
    """One operator's conversation with one robot over one scene lineage."""

    def __init__(self, scene: Scene, assistant, session_id: Optional[str] = None):
        self.id = session_id or uuid.uuid4().hex[:12]
        self.assistant = assistant
        self.scene = scene
        self.state = SessionState.AWAITING_INSTRUCTION
        self.pending_task: Optional[tuple[int, int]] = None
        self.transcript: list[TranscriptEntry] = []
        self.pending_selections = SelectionBatch()
        self.created_at = time.time()
        self._last_confirm_text: Optional[str] = None
        self._lock = threading.RLock()

    # -- helpers ----------------------------------------------------------

    @property
    def elapsed_s(self) -> float:
        return time.time() - self.created_at

    def _append(self, speaker: str, text: str) -> TranscriptEntry:
        entry = TranscriptEntry(speaker=speaker, text=text, timestamp=time.time())
        self.transcript.append(entry)
        return entry

    def _history(self) -> tuple[tuple[str, str], ...]:
        return tuple(
            (e.speaker, e.text) for e in self.transcript if e.speaker in ("user", "robot")
        )

    def _require_not_busy(self) -> None:
        if self.state in _BUSY_STATES:
            raise SessionBusyError(f"session is busy ({self.state.value})")

    # -- operations -------------------------------------------------------

    def select(self, object_id: int) -> SelectionHighlight:
        """Record a pointing selection for the next message."""
        with self._lock:
            self._require_not_busy()
            return record_selection(self.pending_selections, self.scene, object_id)

    def submit(self, utterance: str) -> AssistantReply:
        """Send a message: fuse, parse, validate, reply, transition."""
        with self._lock:
            self._require_not_busy()
            command = compose(utterance, self.pending_selections)
            self._append("user", command.text)
            intent = parse_command(command, self.scene)
            verdict = (
                validate(self.scene, intent)
                if intent.action is Action.PICK_PLACE
                else None
            )
            request = AssistantRequest(
                intent=intent,
                verdict=verdict,
                message=command.text,
                history=self._history()[:-1],
                confirmation_pending=self.state in _CONFIRMABLE_STATES
                and self.pending_task is not None,
            )
            if not getattr(self.assistant, "remote", False):
                reply = self.assistant.reply(request)
                return self._apply_reply(intent, reply)

            # Remote assistant: release the lock for the network call and
            # park the session so concurrent inputs bounce as busy.
            resume_state = self.state
            self.state = SessionState.ASSISTANT_PENDING
        try:
            reply = self.assistant.reply(request)
        except Exception:
            with self._lock:
                self.state = resume_state
                self._append("system", "assistant unavailable; message not processed")
            raise
        with self._lock:
            self.state = resume_state
            return self._apply_reply(intent, reply)

    def _apply_reply(self, intent: ParsedIntent, reply: AssistantReply) -> AssistantReply:
        kind = reply.kind
        if kind is ReplyKind.CONFIRM_REQUEST:
            panel, stud = reply.cited_ids
            if panel is None or stud is None:
                # A confirmation that cites nothing cannot gate a task.
                kind = ReplyKind.CLARIFICATION
            else:
                self.pending_task = (panel, stud)
                self._last_confirm_text = reply.text
                self.state = SessionState.AWAITING_CONFIRMATION
        if kind is ReplyKind.ACKNOWLEDGE:
            legal = (
                self.state in _CONFIRMABLE_STATES
                and self.pending_task is not None
                and intent.action is Action.CONFIRM
            )
            if legal:
                self.state = SessionState.READY_FOR_APPROVAL
            else:
                # An acknowledgment with nothing confirmed never arms approval.
                kind = ReplyKind.CLARIFICATION
        if kind in (ReplyKind.CLARIFICATION, ReplyKind.REJECTION):
            self.pending_task = None
            self._last_confirm_text = None
            self.state = SessionState.AWAITING_INSTRUCTION
        # REASK leaves the state alone: a blank message neither cancels a
        # pending confirmation nor disarms an acknowledged task.
        if kind is not reply.kind:
            reply = replace(reply, kind=kind)
        self._append("robot", reply.text)
        return reply

    def approve(self) -> TaskCommand:
        """The human approval gate: emit the pending task for dispatch."""
        with self._lock:
            if self.state is not SessionState.READY_FOR_APPROVAL:
                raise SessionStateError(
                    f"nothing approved: session is {self.state.value}, "
                    "approval needs a confirmed task acknowledged with "
                    "the OKAY!!! reply"
                )
            assert self.pending_task is not None and self._last_confirm_text is not None
            panels, studs, _ = extract_ids(self._last_confirm_text, self.scene)
            extracted = (
                panels[0] if len(panels) == 1 else None,
                studs[0] if len(studs) == 1 else None,
            )
            if extracted != self.pending_task:
                raise ExtractionMismatchError(
                    f"confirmation text yields {extracted}, pending task is "
                    f"{self.pending_task}; refusing to dispatch"
                )
            self.state = SessionState.DISPATCHING
            panel, stud = self.pending_task
            return TaskCommand(target_id=panel, destination_id=stud, session=self.id)

    def complete(self, success: bool, detail: str = "") -> None:
        """Robot outcome: commit the install on success, roll back on failure."""
        with self._lock:
            if self.state is not SessionState.DISPATCHING:
                raise SessionStateError(
                    f"no task in flight: session is {self.state.value}"
                )
            assert self.pending_task is not None
            panel, stud = self.pending_task
            if success:
                try:
                    self.scene = apply_install(self.scene, panel, stud)
                    self._append(
                        "system", f"task complete: panel {panel} installed on stud {stud}"
                    )
                except SceneIntegrityError as exc:
                    # Last line of defense: an approved-but-impossible task
                    # (possible when a remote assistant misses an error) is
                    # recorded as a failure, never applied.
                    self._append("system", f"task aborted: {exc}")
            else:
                note = f"task failed: panel {panel} not installed"
                if detail:
                    note += f" ({detail})"
                self._append("system", note)
            self.pending_task = None
            self._last_confirm_text = None
            self.state = SessionState.AWAITING_INSTRUCTION
