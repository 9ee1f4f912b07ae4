"""Semantic scene model: panels, studs, and installation state.

The scene is the single source of truth that every other layer queries:
which objects exist, their sizes, which destination areas accept which
panel sizes, and what has already been installed.  Scene values are
immutable; installing a panel produces a new scene value, which makes
replay and what-if evaluation trivial and lets sessions share a base
scene safely.

Scene files are JSON documents:

    {"objects": [{"id": 501, "kind": "panel", "name": "...", "layer": "...",
                  "size_ft": [4, 8]}, ...],
     "metadata": {"name": "..."}}

Panels carry ``size_ft`` and, once installed, ``installed_on``.  Studs
that serve as destinations carry ``area_label`` and
``allowed_panel_size``; plain framing studs carry neither, which the
validator reads as "no panel may be placed here".  Unrecognized object
fields (positions, geometry, ...) are preserved verbatim but never
interpreted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Optional


class SceneError(Exception):
    """Base class for scene loading and mutation failures."""


class SceneParseError(SceneError):
    """The document is not valid JSON or does not match the schema."""


class SceneIntegrityError(SceneError):
    """The document parses but violates a scene invariant."""


class UnknownObjectError(SceneError):
    """Lookup of an id that does not exist in the scene."""

    def __init__(self, object_id: int):
        super().__init__(f"no object with id {object_id} in scene")
        self.object_id = object_id


class ObjectKind(str, Enum):
    PANEL = "panel"
    STUD = "stud"
    OTHER = "other"


class AreaLabel(str, Enum):
    """Named destination areas, ordered left to right along the stud wall."""

    LEFTMOST = "leftmost"
    SECOND_LEFTMOST = "second_leftmost"
    SECOND_RIGHTMOST = "second_rightmost"
    RIGHTMOST = "rightmost"

    @property
    def phrase(self) -> str:
        """Spoken form, e.g. ``second_rightmost`` -> ``second rightmost``."""
        return self.value.replace("_", " ")


Size = tuple[float, float]


@dataclass(frozen=True)
class SceneObject:
    id: int
    kind: ObjectKind
    name: str
    layer: str
    size_ft: Optional[Size] = None
    area_label: Optional[AreaLabel] = None
    allowed_panel_size: Optional[Size] = None
    installed_on: Optional[int] = None
    occupied_by: Optional[int] = None
    extra: Mapping[str, Any] = field(default_factory=dict)

    @property
    def is_panel(self) -> bool:
        return self.kind is ObjectKind.PANEL

    @property
    def is_stud(self) -> bool:
        return self.kind is ObjectKind.STUD

    @property
    def is_destination(self) -> bool:
        """True for studs designated to receive a panel's center."""
        return self.is_stud and self.allowed_panel_size is not None


@dataclass(frozen=True)
class Scene:
    objects: Mapping[int, SceneObject]
    metadata: Mapping[str, str] = field(default_factory=dict)

    def get(self, object_id: int) -> Optional[SceneObject]:
        return self.objects.get(object_id)

    def panels(self) -> list[SceneObject]:
        return sorted(
            (o for o in self.objects.values() if o.is_panel), key=lambda o: o.id
        )

    def studs(self) -> list[SceneObject]:
        return sorted(
            (o for o in self.objects.values() if o.is_stud), key=lambda o: o.id
        )

    def destination_studs(self) -> list[SceneObject]:
        return [s for s in self.studs() if s.is_destination]


def lookup(scene: Scene, object_id: int) -> SceneObject:
    """Return the object with ``object_id`` or raise :class:`UnknownObjectError`.

    The raised error is the signal behind the "Materials Not Present"
    instruction category; callers that prefer a soft miss use
    :meth:`Scene.get`.
    """
    obj = scene.get(object_id)
    if obj is None:
        raise UnknownObjectError(object_id)
    return obj


def available(scene: Scene, kind: ObjectKind) -> list[SceneObject]:
    """Objects of ``kind`` still usable for an install, ascending by id.

    Panels: not yet installed.  Studs: destination studs not yet occupied
    (plain framing studs never accept a panel, so they are never listed).
    Other kinds have no install role and yield an empty list.
    """
    if kind is ObjectKind.PANEL:
        return [p for p in scene.panels() if p.installed_on is None]
    if kind is ObjectKind.STUD:
        return [s for s in scene.destination_studs() if s.occupied_by is None]
    return []


def apply_install(scene: Scene, panel_id: int, stud_id: int) -> Scene:
    """Record ``panel_id`` installed on ``stud_id``, returning a new scene.

    Callers are expected to validate first; this operation only defends
    against the hard failures (unknown ids, wrong kinds, panel already
    installed, stud already occupied) and raises
    :class:`SceneIntegrityError` on any of them.
    """
    panel = lookup(scene, panel_id)
    stud = lookup(scene, stud_id)
    if not panel.is_panel:
        raise SceneIntegrityError(f"object {panel_id} is not a panel")
    if not stud.is_stud:
        raise SceneIntegrityError(f"object {stud_id} is not a stud")
    if panel.installed_on is not None:
        raise SceneIntegrityError(
            f"panel {panel_id} is already installed on stud {panel.installed_on}"
        )
    if stud.occupied_by is not None:
        raise SceneIntegrityError(
            f"stud {stud_id} is already occupied by panel {stud.occupied_by}"
        )
    objects = dict(scene.objects)
    objects[panel_id] = replace(panel, installed_on=stud_id)
    objects[stud_id] = replace(stud, occupied_by=panel_id)
    return Scene(objects=objects, metadata=scene.metadata)


_KNOWN_FIELDS = {
    "id",
    "kind",
    "name",
    "layer",
    "size_ft",
    "area_label",
    "allowed_panel_size",
    "installed_on",
    "occupied_by",
}


def _parse_size(value: Any, object_id: int, field_name: str) -> Size:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SceneParseError(
            f"object {object_id}: {field_name} must be a [width, height] pair"
        )
    if any(v <= 0 for v in value):
        raise SceneParseError(f"object {object_id}: {field_name} must be positive")
    return (value[0], value[1])


def _parse_object(raw: Any) -> SceneObject:
    if not isinstance(raw, dict):
        raise SceneParseError("each object must be a JSON object")
    object_id = raw.get("id")
    if not isinstance(object_id, int) or isinstance(object_id, bool) or object_id <= 0:
        raise SceneParseError(f"object id must be a positive integer, got {object_id!r}")
    try:
        kind = ObjectKind(raw.get("kind"))
    except ValueError:
        raise SceneParseError(
            f"object {object_id}: kind must be one of 'panel', 'stud', 'other'"
        ) from None
    name = raw.get("name")
    layer = raw.get("layer")
    if not isinstance(name, str) or not isinstance(layer, str):
        raise SceneParseError(f"object {object_id}: name and layer are required strings")

    size_ft = raw.get("size_ft")
    if size_ft is not None:
        size_ft = _parse_size(size_ft, object_id, "size_ft")
    allowed = raw.get("allowed_panel_size")
    if allowed is not None:
        allowed = _parse_size(allowed, object_id, "allowed_panel_size")
    area_label = raw.get("area_label")
    if area_label is not None:
        try:
            area_label = AreaLabel(area_label)
        except ValueError:
            raise SceneParseError(
                f"object {object_id}: unknown area_label {area_label!r}"
            ) from None

    for ref_field in ("installed_on", "occupied_by"):
        ref = raw.get(ref_field)
        if ref is not None and (not isinstance(ref, int) or isinstance(ref, bool)):
            raise SceneParseError(f"object {object_id}: {ref_field} must be an integer id")

    extra = {k: v for k, v in raw.items() if k not in _KNOWN_FIELDS}
    return SceneObject(
        id=object_id,
        kind=kind,
        name=name,
        layer=layer,
        size_ft=size_ft,
        area_label=area_label,
        allowed_panel_size=allowed,
        installed_on=raw.get("installed_on"),
        occupied_by=raw.get("occupied_by"),
        extra=extra,
    )


def _check_integrity(objects: Mapping[int, SceneObject]) -> None:
    for obj in objects.values():
        if obj.is_panel:
            if obj.area_label is not None or obj.allowed_panel_size is not None:
                raise SceneIntegrityError(
                    f"panel {obj.id} may not carry area_label or allowed_panel_size"
                )
            if obj.occupied_by is not None:
                raise SceneIntegrityError(f"panel {obj.id} may not carry occupied_by")
            if obj.size_ft is None:
                raise SceneIntegrityError(f"panel {obj.id} must carry size_ft")
        elif obj.is_stud:
            if obj.size_ft is not None or obj.installed_on is not None:
                raise SceneIntegrityError(
                    f"stud {obj.id} may not carry size_ft or installed_on"
                )
        else:
            if any(
                v is not None
                for v in (obj.size_ft, obj.area_label, obj.allowed_panel_size,
                          obj.installed_on, obj.occupied_by)
            ):
                raise SceneIntegrityError(
                    f"object {obj.id} of kind 'other' may not carry install fields"
                )

    # installed_on / occupied_by must agree in both directions
    for obj in objects.values():
        if obj.is_panel and obj.installed_on is not None:
            stud = objects.get(obj.installed_on)
            if stud is None or not stud.is_stud:
                raise SceneIntegrityError(
                    f"panel {obj.id}: installed_on {obj.installed_on} is not a stud"
                )
            if stud.occupied_by != obj.id:
                raise SceneIntegrityError(
                    f"panel {obj.id} claims stud {stud.id} but the stud does not agree"
                )
        if obj.is_stud and obj.occupied_by is not None:
            panel = objects.get(obj.occupied_by)
            if panel is None or not panel.is_panel:
                raise SceneIntegrityError(
                    f"stud {obj.id}: occupied_by {obj.occupied_by} is not a panel"
                )
            if panel.installed_on != obj.id:
                raise SceneIntegrityError(
                    f"stud {obj.id} claims panel {panel.id} but the panel does not agree"
                )


def load_scene(document: str) -> Scene:
    """Parse a scene JSON document and verify every invariant.

    Raises :class:`SceneParseError` for malformed documents and
    :class:`SceneIntegrityError` for well-formed documents with
    inconsistent content (duplicate ids, dangling install references,
    install fields on the wrong kind).
    """
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("objects"), list):
        raise SceneParseError("scene document must contain an 'objects' list")

    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise SceneParseError("metadata must be a string-to-string map")

    objects: dict[int, SceneObject] = {}
    for raw in data["objects"]:
        obj = _parse_object(raw)
        if obj.id in objects:
            raise SceneIntegrityError(f"duplicate object id {obj.id}")
        objects[obj.id] = obj
    _check_integrity(objects)
    return Scene(objects=objects, metadata=dict(metadata))


def load_scene_file(path: str) -> Scene:
    with open(path, encoding="utf-8") as fh:
        return load_scene(fh.read())


def serialize_scene(scene: Scene) -> str:
    """Render a scene back to its JSON document form (stable ordering)."""
    objects = []
    for obj in sorted(scene.objects.values(), key=lambda o: o.id):
        raw: dict[str, Any] = {
            "id": obj.id,
            "kind": obj.kind.value,
            "name": obj.name,
            "layer": obj.layer,
        }
        if obj.size_ft is not None:
            raw["size_ft"] = list(obj.size_ft)
        if obj.area_label is not None:
            raw["area_label"] = obj.area_label.value
        if obj.allowed_panel_size is not None:
            raw["allowed_panel_size"] = list(obj.allowed_panel_size)
        if obj.installed_on is not None:
            raw["installed_on"] = obj.installed_on
        if obj.occupied_by is not None:
            raw["occupied_by"] = obj.occupied_by
        raw.update(obj.extra)
        objects.append(raw)
    return json.dumps(
        {"objects": objects, "metadata": dict(scene.metadata)}, indent=2
    )


def format_feet(value: float) -> str:
    """``4.0`` -> ``"4"``; non-integral sizes keep their fraction."""
    if float(value).is_integer():
        return str(int(value))
    return str(value)


def format_size(size: Size) -> str:
    """``(4, 8)`` -> ``"4 by 8"`` as used in prompts and explanations."""
    return f"{format_feet(size[0])} by {format_feet(size[1])}"
