"""Fusing spoken commands with pointing selections.

A pointing gesture arrives as a selection event carrying an object id.
Selections are held in a per-session batch until the user sends a
message; sending fuses the typed/transcribed utterance with one clause
per pending selection, substituting the object's id into a fixed
placeholder template:

    compose("pick up this one", batch with target 127)
        -> "pick up this one. The ID of the target object is 127."

Selecting a panel records a target, selecting a destination stud records
a destination; re-selecting the same role replaces the earlier pick
(latest wins).  Plain framing studs are not interactable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .scene import Scene, lookup

PLACEHOLDER = "####"
TARGET_CLAUSE_TEMPLATE = f"The ID of the target object is {PLACEHOLDER}."
DESTINATION_CLAUSE_TEMPLATE = f"The destination is the center of stud {PLACEHOLDER}."

_TERMINAL_PUNCTUATION = (".", "!", "?")


class FusionError(Exception):
    pass


class NonInteractableError(FusionError):
    """The object exists but cannot be pointed at (e.g. a plain framing stud)."""

    def __init__(self, object_id: int, reason: str):
        super().__init__(f"object {object_id} is not interactable: {reason}")
        self.object_id = object_id
        self.reason = reason


class SelectionRole(str, Enum):
    TARGET = "target"
    DESTINATION = "destination"


@dataclass(frozen=True)
class SelectionEvent:
    object_id: int
    role: SelectionRole
    sequence: int


@dataclass(frozen=True)
class SelectionHighlight:
    """Acknowledgment for the UI: flash the picked object red briefly."""

    object_id: int
    role: SelectionRole


class SelectionBatch:
    """Pending selections for one session: at most one per role, latest wins."""

    def __init__(self) -> None:
        self._events: dict[SelectionRole, SelectionEvent] = {}
        self._next_sequence = 0

    def add(self, object_id: int, role: SelectionRole) -> SelectionEvent:
        event = SelectionEvent(object_id=object_id, role=role, sequence=self._next_sequence)
        self._next_sequence += 1
        self._events[role] = event
        return event

    def events(self) -> list[SelectionEvent]:
        """Pending events, target before destination regardless of click order."""
        ordered = []
        for role in (SelectionRole.TARGET, SelectionRole.DESTINATION):
            if role in self._events:
                ordered.append(self._events[role])
        return ordered

    def pending(self) -> dict[SelectionRole, int]:
        return {role: event.object_id for role, event in self._events.items()}

    def clear(self) -> None:
        self._events.clear()

    def __bool__(self) -> bool:
        return bool(self._events)


@dataclass(frozen=True)
class CompositeCommand:
    """The fused message: original utterance plus one clause per selection."""

    text: str
    utterance: str
    attachments: tuple[SelectionEvent, ...]


def infer_role(scene: Scene, object_id: int) -> SelectionRole:
    """Pointing role from object kind: panels are targets, destination studs
    are destinations.  Raises for unknown or non-interactable objects."""
    obj = lookup(scene, object_id)
    if obj.is_panel:
        return SelectionRole.TARGET
    if obj.is_stud:
        if obj.is_destination:
            return SelectionRole.DESTINATION
        raise NonInteractableError(object_id, "panels can't be placed on this stud")
    raise NonInteractableError(object_id, "not a panel or destination stud")


def record_selection(
    batch: SelectionBatch, scene: Scene, object_id: int
) -> SelectionHighlight:
    """Record a pointing selection into the batch and return the UI highlight.

    Raises :class:`~hrc.scene.UnknownObjectError` for absent ids and
    :class:`NonInteractableError` for objects that take no pointing role.
    """
    role = infer_role(scene, object_id)
    batch.add(object_id, role)
    return SelectionHighlight(object_id=object_id, role=role)


def _clause(template: str, object_id: int) -> str:
    return template.replace(PLACEHOLDER, str(object_id))


def compose(utterance: str, batch: SelectionBatch) -> CompositeCommand:
    """Fuse the utterance with pending selections and clear the batch.

    The utterance is kept verbatim as a prefix; if it has content but no
    terminal punctuation, a period is added before the clauses so the
    result reads as sentences.  An empty utterance with no selections
    yields an empty composite (the blank-message case downstream).
    """
    events = tuple(batch.events())
    batch.clear()

    parts: list[str] = []
    if utterance:
        text = utterance
        if text.strip() and not text.rstrip().endswith(_TERMINAL_PUNCTUATION):
            text = text + "."
        parts.append(text)
    for event in events:
        if event.role is SelectionRole.TARGET:
            parts.append(_clause(TARGET_CLAUSE_TEMPLATE, event.object_id))
        else:
            parts.append(_clause(DESTINATION_CLAUSE_TEMPLATE, event.object_id))
    return CompositeCommand(text=" ".join(parts), utterance=utterance, attachments=events)


__all__ = [
    "PLACEHOLDER",
    "TARGET_CLAUSE_TEMPLATE",
    "DESTINATION_CLAUSE_TEMPLATE",
    "CompositeCommand",
    "FusionError",
    "NonInteractableError",
    "SelectionBatch",
    "SelectionEvent",
    "SelectionHighlight",
    "SelectionRole",
    "compose",
    "infer_role",
    "record_selection",
]
