"""Grounding composite commands into (target panel, destination stud) intents.

The parser is deliberately rule-based so the deterministic assistant and
the validation oracle run with no network access.  It grounds three
kinds of reference:

* literal integer ids, classified by what the scene says they are;
* spatial area phrases ("second rightmost", ...) mapped to their
  destination studs;
* pointing attachments fused into the command.

Everything it cannot ground cleanly is expressed as an ambiguity
annotation rather than an error: conflicting ids for one role, a missing
role, or a blank message.

Lexicons are fixed and documented here:

* action verbs: pick, place, install, put, hang
* affirmations: :data:`AFFIRMATIONS`
* negations: :data:`NEGATIONS`

A command with no verb still parses as a pick-and-place instruction when
it references materials ("Panel 504 to stud 606").
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .fusion import CompositeCommand, SelectionRole
from .scene import ObjectKind, Scene

# Canonical destination-area layout: four named areas, one stud at the
# center of each.  Longest phrase wins, so "second rightmost" never
# resolves as "rightmost".
AREA_PHRASE_TO_STUD = {
    "leftmost": 602,
    "second leftmost": 604,
    "second rightmost": 606,
    "rightmost": 608,
}

_AREA_PATTERN = re.compile(
    r"\b(second\s+leftmost|second\s+rightmost|leftmost|rightmost)\b", re.IGNORECASE
)
# "third leftmost" names no area; only bare or "second"-qualified phrases do.
_FOREIGN_ORDINALS = {
    "first", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
}
_PRECEDING_WORD = re.compile(r"([a-zA-Z]+)\s*$")

ACTION_VERBS = {"pick", "place", "install", "put", "hang"}

AFFIRMATIONS = {
    "yes",
    "yeah",
    "yep",
    "correct",
    "confirmed",
    "it's correct",
    "it is correct",
    "that's correct",
    "that is correct",
    "yes it's correct",
    "yes, it's correct",
}

NEGATIONS = {
    "no",
    "nope",
    "wrong",
    "incorrect",
    "not correct",
    "it's wrong",
    "it is wrong",
    "it's incorrect",
    "it's not correct",
    "that's wrong",
    "that is wrong",
    "that's incorrect",
    "cancel",
    "never mind",
}

# Nouns that bind a following number to a role even when the number is
# unknown to the scene ("panel 999" stays a target reference so the
# not-present check can name it).
_TARGET_NOUNS = {"panel", "panels", "drywall", "drywalls", "sheet", "board", "target"}
_DESTINATION_NOUNS = {
    "stud",
    "studs",
    "destination",
    "area",
    "position",
    "location",
    "column",
}
_NOUN_SKIP_WORDS = {"number", "id", "no"}

_INT_TOKEN = re.compile(r"\b\d+\b")
_WORD_TOKEN = re.compile(r"[a-zA-Z']+|\d+")
# "4 by 8" style size mentions are dimensions, not object ids.
_SIZE_MENTION = re.compile(r"\b\d+(?:\.\d+)?\s*(?:by|x)\s*\d+(?:\.\d+)?\b", re.IGNORECASE)


class Action(Enum):
    PICK_PLACE = "pick_place"
    CONFIRM = "confirm"
    DENY = "deny"
    UNKNOWN = "unknown"


class Ambiguity(Enum):
    NONE = "none"
    CONFLICTING_TARGETS = "conflicting_targets"
    CONFLICTING_DESTINATIONS = "conflicting_destinations"
    MISSING_TARGET = "missing_target"
    MISSING_DESTINATION = "missing_destination"
    BLANK = "blank"


@dataclass(frozen=True)
class ParsedIntent:
    """Grounded reading of one command.

    ``ambiguity`` is meaningful for instruction intents (``PICK_PLACE`` /
    ``UNKNOWN``); confirmations and denials carry ``NONE``.  ``unknown_refs``
    lists integers that looked like object references but name nothing in
    the scene; they feed the not-present check.
    """

    action: Action
    target_refs: tuple[int, ...] = ()
    destination_refs: tuple[int, ...] = ()
    ambiguity: Ambiguity = Ambiguity.NONE
    unknown_refs: tuple[int, ...] = ()

    @property
    def target(self) -> Optional[int]:
        return self.target_refs[0] if len(self.target_refs) == 1 else None

    @property
    def destination(self) -> Optional[int]:
        return self.destination_refs[0] if len(self.destination_refs) == 1 else None


def _normalize(text: str) -> str:
    text = text.replace("’", "'").lower().strip()
    text = re.sub(r"\s+", " ", text)
    return text.strip(" .!?,")


def resolve_area_phrase(phrase: str) -> Optional[int]:
    """Map an area phrase to its destination stud id, or ``None``.

    Matching is case-insensitive and finds the phrase anywhere in the
    text ("the rightmost portion of the framing" -> 608); exactly the
    four canonical phrases resolve, longest match first.
    """
    hits = area_references(phrase)
    return hits[0] if hits else None


def area_references(text: str) -> list[int]:
    """All distinct area-phrase hits in ``text``, in order of appearance."""
    seen: list[int] = []
    for match in _AREA_PATTERN.finditer(text):
        before = _PRECEDING_WORD.search(text[: match.start()])
        if before is not None and before.group(1).lower() in _FOREIGN_ORDINALS:
            continue
        phrase = re.sub(r"\s+", " ", match.group(1).lower())
        stud = AREA_PHRASE_TO_STUD[phrase]
        if stud not in seen:
            seen.append(stud)
    return seen


def extract_ids(text: str, scene: Scene) -> tuple[list[int], list[int], list[int]]:
    """Scan standalone integer tokens and classify each by scene kind.

    Returns ``(panel_ids, stud_ids, unknown_ids)`` in order of first
    appearance.  Integers embedded in words are not ids, and "4 by 8"
    style size mentions are ignored.  Ids the scene does not know (or
    knows as neither panel nor stud) land in the unknown bucket.
    """
    scrubbed = _SIZE_MENTION.sub(" ", text)
    panels: list[int] = []
    studs: list[int] = []
    unknown: list[int] = []
    for token in _INT_TOKEN.finditer(scrubbed):
        object_id = int(token.group())
        obj = scene.get(object_id)
        if obj is not None and obj.kind is ObjectKind.PANEL:
            bucket = panels
        elif obj is not None and obj.kind is ObjectKind.STUD:
            bucket = studs
        else:
            bucket = unknown
        if object_id not in bucket:
            bucket.append(object_id)
    return panels, studs, unknown


def _classify_unknowns(text: str, unknown: list[int]) -> tuple[list[int], list[int]]:
    """Split unknown integers into target/destination guesses by the noun
    immediately before them ("panel 999" -> target, "stud 610" -> destination)."""
    tokens = _WORD_TOKEN.findall(_SIZE_MENTION.sub(" ", text).lower())
    as_target: list[int] = []
    as_destination: list[int] = []
    for idx, token in enumerate(tokens):
        if not token.isdigit() or int(token) not in unknown:
            continue
        object_id = int(token)
        look = idx - 1
        while look >= 0 and tokens[look] in _NOUN_SKIP_WORDS:
            look -= 1
        noun = tokens[look] if look >= 0 else ""
        if noun in _TARGET_NOUNS and object_id not in as_target:
            as_target.append(object_id)
        elif noun in _DESTINATION_NOUNS and object_id not in as_destination:
            as_destination.append(object_id)
    return as_target, as_destination


def _has_action_verb(text: str) -> bool:
    words = set(_WORD_TOKEN.findall(text.lower()))
    return bool(words & ACTION_VERBS)


def parse_command(command: CompositeCommand, scene: Scene) -> ParsedIntent:
    """Ground a composite command against the scene.

    Affirmations and negations are recognized by exact match of the
    normalized message against the fixed lexicons; everything else is
    treated as an instruction attempt and grounded into target/destination
    references with an ambiguity annotation.
    """
    text = command.text
    if not text.strip() and not command.attachments:
        return ParsedIntent(action=Action.UNKNOWN, ambiguity=Ambiguity.BLANK)

    normalized = _normalize(text)
    if normalized in AFFIRMATIONS:
        return ParsedIntent(action=Action.CONFIRM)
    if normalized in NEGATIONS:
        return ParsedIntent(action=Action.DENY)

    panels, studs, unknown = extract_ids(text, scene)
    unknown_targets, unknown_destinations = _classify_unknowns(text, unknown)

    targets = list(panels)
    destinations = list(studs)
    for stud in area_references(text):
        if stud not in destinations:
            destinations.append(stud)
    for event in command.attachments:
        bucket = targets if event.role is SelectionRole.TARGET else destinations
        if event.object_id not in bucket:
            bucket.append(event.object_id)
    for object_id in unknown_targets:
        if object_id not in targets:
            targets.append(object_id)
    for object_id in unknown_destinations:
        if object_id not in destinations:
            destinations.append(object_id)

    # Unknown ids with no binding noun fill whichever role is still open.
    unplaced = [i for i in unknown if i not in targets and i not in destinations]
    if unplaced:
        if not targets and destinations:
            targets.extend(unplaced)
        elif not destinations and targets:
            destinations.extend(unplaced)
        elif not targets and not destinations:
            targets.extend(unplaced)

    if len(targets) > 1:
        ambiguity = Ambiguity.CONFLICTING_TARGETS
    elif len(destinations) > 1:
        ambiguity = Ambiguity.CONFLICTING_DESTINATIONS
    elif not targets:
        ambiguity = Ambiguity.MISSING_TARGET
    elif not destinations:
        ambiguity = Ambiguity.MISSING_DESTINATION
    else:
        ambiguity = Ambiguity.NONE

    mentions_materials = bool(targets or destinations or unknown)
    action = Action.PICK_PLACE if (_has_action_verb(text) or mentions_materials) else Action.UNKNOWN
    return ParsedIntent(
        action=action,
        target_refs=tuple(targets),
        destination_refs=tuple(destinations),
        ambiguity=ambiguity,
        unknown_refs=tuple(unknown),
    )
