"""Instruction correctness oracle.

Every pick-and-place intent is checked against the scene constraints and
the installation history and sorted into one of four error categories or
approved:

* ``PARTIAL_OR_DUPLICATE`` — the intent itself is ambiguous (conflicting
  or missing references, blank message).
* ``MATERIAL_NOT_PRESENT`` — a referenced id names nothing on site.
* ``ALREADY_INSTALLED`` — the panel is already up, or the stud already
  holds one.
* ``MISMATCHED_PAIRING`` — the stud is not a destination stud, or its
  allowed panel size differs from the panel's size.

Checks run in exactly that order; an instruction with several faults
reports the first one (ambiguity is resolved before world state is
consulted).  Non-``OK`` results carry an explanation and suggest only
objects that are still available and size-compatible with the request.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .parsing import Action, Ambiguity, ParsedIntent
from .scene import ObjectKind, Scene, SceneObject, available, format_size


class Verdict(Enum):
    OK = "ok"
    MISMATCHED_PAIRING = "mismatched_pairing"
    MATERIAL_NOT_PRESENT = "material_not_present"
    ALREADY_INSTALLED = "already_installed"
    PARTIAL_OR_DUPLICATE = "partial_or_duplicate"


#: Report row labels for each error category.
CATEGORY_LABELS = {
    Verdict.MISMATCHED_PAIRING: "Mismatched pairing",
    Verdict.MATERIAL_NOT_PRESENT: "Materials Not Present",
    Verdict.ALREADY_INSTALLED: "Component Already Installed",
    Verdict.PARTIAL_OR_DUPLICATE: "Partial Information",
}


@dataclass(frozen=True)
class ValidationResult:
    verdict: Verdict
    explanation: str
    suggestions: tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.OK


class ContractError(Exception):
    """validate() was called with something other than a pick-place intent."""


def _ids(objects: list[SceneObject]) -> tuple[int, ...]:
    return tuple(o.id for o in objects)


def _join_ids(ids) -> str:
    ids = list(ids)
    if not ids:
        return "none"
    if len(ids) == 1:
        return str(ids[0])
    return ", ".join(str(i) for i in ids[:-1]) + f" and {ids[-1]}"


def _available_panels_for(scene: Scene, stud: Optional[SceneObject]) -> tuple[int, ...]:
    panels = available(scene, ObjectKind.PANEL)
    if stud is not None and stud.allowed_panel_size is not None:
        panels = [p for p in panels if p.size_ft == stud.allowed_panel_size]
    return _ids(panels)


def _available_studs_for(scene: Scene, panel: Optional[SceneObject]) -> tuple[int, ...]:
    studs = available(scene, ObjectKind.STUD)
    if panel is not None and panel.size_ft is not None:
        studs = [s for s in studs if s.allowed_panel_size == panel.size_ft]
    return _ids(studs)


def _ambiguity_result(scene: Scene, intent: ParsedIntent) -> ValidationResult:
    kind = intent.ambiguity
    if kind is Ambiguity.CONFLICTING_TARGETS:
        explanation = (
            f"I received two different target panels: {_join_ids(intent.target_refs)}."
        )
        suggestions: tuple[int, ...] = ()
    elif kind is Ambiguity.CONFLICTING_DESTINATIONS:
        explanation = (
            "I received two different destination studs: "
            f"{_join_ids(intent.destination_refs)}."
        )
        suggestions = ()
    elif kind is Ambiguity.MISSING_TARGET:
        explanation = "The instruction does not say which panel to pick up."
        suggestions = _ids(available(scene, ObjectKind.PANEL))
    elif kind is Ambiguity.MISSING_DESTINATION:
        explanation = "The instruction does not say which stud the panel goes on."
        suggestions = _available_studs_for(scene, _single(scene, intent.target_refs))
    else:  # BLANK
        explanation = "The message contains no instruction."
        suggestions = ()
    return ValidationResult(Verdict.PARTIAL_OR_DUPLICATE, explanation, suggestions)


def _single(scene: Scene, refs: tuple[int, ...]) -> Optional[SceneObject]:
    if len(refs) == 1:
        return scene.get(refs[0])
    return None


def validate(scene: Scene, intent: ParsedIntent) -> ValidationResult:
    """Judge a grounded pick-and-place intent against scene and history."""
    if intent.action is not Action.PICK_PLACE:
        raise ContractError(f"validate() requires a pick-place intent, got {intent.action}")

    if intent.ambiguity is not Ambiguity.NONE:
        return _ambiguity_result(scene, intent)

    if intent.unknown_refs:
        missing = _join_ids(intent.unknown_refs)
        suggestions: list[int] = []
        if any(i in intent.target_refs for i in intent.unknown_refs):
            stud = _single(scene, intent.destination_refs)
            stud = stud if stud is not None and stud.is_stud else None
            suggestions.extend(_available_panels_for(scene, stud))
        if any(i in intent.destination_refs for i in intent.unknown_refs):
            panel = _single(scene, intent.target_refs)
            panel = panel if panel is not None and panel.is_panel else None
            suggestions.extend(_available_studs_for(scene, panel))
        return ValidationResult(
            Verdict.MATERIAL_NOT_PRESENT,
            f"There is no material with ID {missing} on the site.",
            tuple(dict.fromkeys(suggestions)),
        )

    panel = scene.get(intent.target_refs[0])
    stud = scene.get(intent.destination_refs[0])
    assert panel is not None and stud is not None  # unknown ids handled above

    if not panel.is_panel or not stud.is_stud:
        wrong = panel if not panel.is_panel else stud
        role = "a target panel" if wrong is panel else "a destination stud"
        return ValidationResult(
            Verdict.MISMATCHED_PAIRING,
            f"Object {wrong.id} cannot be used as {role}.",
        )

    if panel.installed_on is not None or stud.occupied_by is not None:
        reasons = []
        suggestions = []
        if panel.installed_on is not None:
            reasons.append(
                f"Panel {panel.id} is already installed on stud {panel.installed_on}."
            )
            suggestions.extend(_available_panels_for(scene, stud))
        if stud.occupied_by is not None:
            reasons.append(
                f"Panel {stud.occupied_by} is already installed on stud {stud.id}."
            )
            suggestions.extend(_available_studs_for(scene, panel))
        return ValidationResult(
            Verdict.ALREADY_INSTALLED,
            " ".join(reasons),
            tuple(dict.fromkeys(suggestions)),
        )

    if stud.allowed_panel_size is None:
        return ValidationResult(
            Verdict.MISMATCHED_PAIRING,
            f"Panels can't be placed on the center of stud {stud.id}.",
            _available_studs_for(scene, panel),
        )
    if panel.size_ft != stud.allowed_panel_size:
        return ValidationResult(
            Verdict.MISMATCHED_PAIRING,
            (
                f"Panel {panel.id} is {format_size(panel.size_ft)} but stud {stud.id} "
                f"only takes {format_size(stud.allowed_panel_size)} sized panels."
            ),
            _available_studs_for(scene, panel),
        )

    return ValidationResult(
        Verdict.OK,
        f"Panel {panel.id} can be installed on the center of stud {stud.id}.",
    )


def _pair_intent(panel_id: int, stud_id: int) -> ParsedIntent:
    return ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(panel_id,),
        destination_refs=(stud_id,),
        ambiguity=Ambiguity.NONE,
    )


def validate_pair(scene: Scene, panel_id: int, stud_id: int) -> ValidationResult:
    """Validate a bare (panel, stud) pair as an unambiguous intent."""
    return validate(scene, _pair_intent(panel_id, stud_id))


def enumerate_verdicts(scene: Scene) -> dict[tuple[int, int], Verdict]:
    """Exhaustive verdicts for every panel x stud pair under current history."""
    table: dict[tuple[int, int], Verdict] = {}
    for panel in scene.panels():
        for stud in scene.studs():
            table[(panel.id, stud.id)] = validate_pair(scene, panel.id, stud.id).verdict
    return table


def verdict_table_csv(scene: Scene) -> str:
    """The enumerate_verdicts table as CSV (panel, stud, verdict)."""
    lines = ["panel,stud,verdict"]
    for (panel_id, stud_id), verdict in sorted(enumerate_verdicts(scene).items()):
        lines.append(f"{panel_id},{stud_id},{verdict.value}")
    return "\n".join(lines) + "\n"
