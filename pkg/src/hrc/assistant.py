"""Robot-side conversational replies.

Two interchangeable assistants produce the robot's half of the dialogue:

* :class:`RuleAssistant` — a deterministic policy backed by the exact
  validator.  Given the same state, intent, and verdict it always
  produces the same templated reply; golden tests pin the templates.
* :class:`LlmAssistant` — a port to an external chat-completion
  endpoint.  The system prompt is generated from the scene by
  :func:`build_prompt`, decoding is pinned to temperature 0, and the
  returned free text is classified back into a reply kind by a small
  heuristic (exact sentinel, id extraction, question mark).  The human
  approval gate is the safety net for misclassification.

Both produce :class:`AssistantReply`: a confirmation request citing the
panel and stud, a clarification, a rejection with alternatives, the
exact acknowledgment sentinel ``OKAY!!!`` that unlocks approval, or a
re-ask for blank messages.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import httpx

from .parsing import Action, Ambiguity, ParsedIntent, extract_ids
from .scene import Scene, format_size
from .validation import ValidationResult, Verdict

ACKNOWLEDGE_SENTINEL = "OKAY!!!"
REASK_TEXT = "How can I assist you further?"


class ReplyKind(Enum):
    CONFIRM_REQUEST = "confirm_request"
    CLARIFICATION = "clarification"
    REJECTION = "rejection"
    ACKNOWLEDGE = "acknowledge"
    REASK = "reask"


@dataclass(frozen=True)
class AssistantReply:
    text: str
    kind: ReplyKind
    cited_ids: tuple[Optional[int], Optional[int]] = (None, None)
    #: Error category the reply reports, when the assistant knows it
    #: (rule mode); drives category matching in the evaluation harness.
    category: Optional[Verdict] = None


class AssistantUnavailableError(Exception):
    """The external assistant endpoint could not produce a reply."""


@dataclass(frozen=True)
class AssistantRequest:
    """Everything an assistant may consult for one turn."""

    intent: ParsedIntent
    verdict: Optional[ValidationResult]
    message: str
    #: (speaker, text) pairs of the conversation so far, oldest first.
    history: tuple[tuple[str, str], ...] = ()
    #: True when a confirmation request is pending ("yes" may acknowledge).
    confirmation_pending: bool = False


def _join_ids(ids) -> str:
    ids = [str(i) for i in ids]
    if len(ids) == 1:
        return ids[0]
    return ", ".join(ids[:-1]) + f" and {ids[-1]}"


def _clarification(intent: ParsedIntent) -> AssistantReply:
    ambiguity = intent.ambiguity
    if ambiguity is Ambiguity.CONFLICTING_TARGETS:
        text = (
            f"You gave me two different target panels: {_join_ids(intent.target_refs)}. "
            "Please confirm which panel ID is correct."
        )
    elif ambiguity is Ambiguity.CONFLICTING_DESTINATIONS:
        text = (
            f"You gave me two different destination studs: {_join_ids(intent.destination_refs)}. "
            "Please confirm which stud ID is correct."
        )
    elif ambiguity is Ambiguity.MISSING_DESTINATION:
        panel = intent.target
        subject = f"panel {panel}" if panel is not None else "the panel"
        text = f"I did not catch where to place {subject}. Please tell me the stud ID."
    else:
        text = "I did not catch which panel to pick up. Please tell me the panel ID."
    return AssistantReply(
        text=text,
        kind=ReplyKind.CLARIFICATION,
        cited_ids=(intent.target, intent.destination),
        category=Verdict.PARTIAL_OR_DUPLICATE,
    )


def _rejection(intent: ParsedIntent, verdict: ValidationResult) -> AssistantReply:
    text = verdict.explanation
    if (
        verdict.verdict is Verdict.MISMATCHED_PAIRING
        and len(verdict.suggestions) == 1
        and intent.target is not None
    ):
        text += (
            f" Would you like to install panel {intent.target} "
            f"on stud {verdict.suggestions[0]} instead?"
        )
    elif verdict.suggestions:
        text += f" The available alternatives are: {_join_ids(verdict.suggestions)}."
    return AssistantReply(
        text=text,
        kind=ReplyKind.REJECTION,
        cited_ids=(intent.target, intent.destination),
        category=verdict.verdict,
    )


def reference_reply(
    confirmation_pending: bool,
    intent: ParsedIntent,
    verdict: Optional[ValidationResult],
) -> AssistantReply:
    """The deterministic reply policy.

    Mapping: blank message -> re-ask; "yes"/"no" while a confirmation is
    pending -> acknowledge / ask for corrected info; ambiguous
    instruction -> clarification naming the problem piece; valid
    instruction -> confirmation request citing both ids; invalid
    instruction -> rejection carrying the validator's explanation and
    suggestions.
    """
    if intent.ambiguity is Ambiguity.BLANK:
        return AssistantReply(text=REASK_TEXT, kind=ReplyKind.REASK)

    if intent.action is Action.CONFIRM:
        if confirmation_pending:
            return AssistantReply(text=ACKNOWLEDGE_SENTINEL, kind=ReplyKind.ACKNOWLEDGE)
        return AssistantReply(text=REASK_TEXT, kind=ReplyKind.REASK)

    if intent.action is Action.DENY:
        if confirmation_pending:
            return AssistantReply(
                text="Understood. Please give me the correct panel and stud information.",
                kind=ReplyKind.CLARIFICATION,
            )
        return AssistantReply(text=REASK_TEXT, kind=ReplyKind.REASK)

    if intent.action is Action.UNKNOWN or intent.ambiguity is not Ambiguity.NONE:
        return _clarification(intent)

    if verdict is None:
        raise ValueError("a grounded pick-place intent requires a verdict")

    if verdict.ok:
        panel, stud = intent.target, intent.destination
        return AssistantReply(
            text=(
                f"You want me to pick up panel {panel} and place it on the center "
                f"of stud {stud}. Is the information correct?"
            ),
            kind=ReplyKind.CONFIRM_REQUEST,
            cited_ids=(panel, stud),
            category=Verdict.OK,
        )
    return _rejection(intent, verdict)


# ---------------------------------------------------------------------------
# Prompt generation
# ---------------------------------------------------------------------------

class PromptError(Exception):
    """The scene cannot yield a meaningful prompt (no panels or destinations)."""


@dataclass(frozen=True)
class InstructionBlocks:
    verification: str
    clarification: str
    history: str
    blank_inquiry: str


@dataclass(frozen=True)
class PromptSpec:
    role_context: str
    material_inventory: str
    destination_rules: str
    instruction_blocks: InstructionBlocks

    def render(self) -> str:
        blocks = self.instruction_blocks
        return "\n\n".join(
            [
                self.role_context,
                self.material_inventory,
                self.destination_rules,
                blocks.verification,
                blocks.clarification,
                blocks.history,
                blocks.blank_inquiry,
            ]
        )


def build_prompt(scene: Scene) -> PromptSpec:
    """Generate the system prompt from scene data.

    The inventory enumerates every panel as "(id, w by h)"; the
    destination rules name each destination area and its allowed panel
    size and forbid the remaining studs.  Output is deterministic for a
    given scene.
    """
    panels = scene.panels()
    destinations = scene.destination_studs()
    if not panels or not destinations:
        raise PromptError("prompt needs at least one panel and one destination stud")

    role_context = (
        "You are a robot on a construction site and you are my teammate. "
        "I will give you natural language instructions for drywall installation. "
        "From each instruction, identify the target panel of the 'pick up' action "
        "and the destination stud of the 'place' action."
    )

    pairs = ", ".join(f"({p.id}, {format_size(p.size_ft)})" for p in panels)
    example = panels[0]
    material_inventory = (
        f"Targets are drywall panels. There are {len(panels)} drywall panels on the "
        f"site; their ID and size pairs are: {pairs}. For example, the size of panel "
        f"{example.id} is {format_size(example.size_ft)}."
    )

    studs = scene.studs()
    lines = [
        "Destinations are components of the stud frame. The stud wall consists of "
        f"{len(studs)} studs, arranged from left to right: "
        f"{', '.join(str(s.id) for s in studs)}. "
        f"Stud {studs[0].id} is the leftmost stud and stud {studs[-1].id} is the "
        "rightmost stud.",
        f"There are {len(destinations)} destination areas; at the center of each "
        "area there is a destination stud, and one panel will be placed on the "
        "center of the selected stud.",
    ]
    for stud in destinations:
        if stud.area_label is not None:
            lines.append(
                f"Stud {stud.id} is at the center of the {stud.area_label.phrase} "
                "destination area."
            )
    by_size: dict[tuple, list[int]] = {}
    for stud in destinations:
        by_size.setdefault(tuple(stud.allowed_panel_size), []).append(stud.id)
    for size in sorted(by_size):
        ids = by_size[size]
        noun = "studs" if len(ids) > 1 else "stud"
        lines.append(
            f"Only {format_size(size)} sized panels should be installed on the "
            f"center of {noun} {_join_ids(ids)}."
        )
    blocked = [s.id for s in studs if not s.is_destination]
    if blocked:
        noun = "studs" if len(blocked) > 1 else "stud"
        lines.append(
            f"Panels can't be placed on the center of {noun} {_join_ids(blocked)}."
        )
    lines.append(
        "If the panel size does not correspond to the destination, it must not be "
        "installed."
    )
    destination_rules = " ".join(lines)

    blocks = InstructionBlocks(
        verification=(
            "After you obtain the target and the destination, ask me whether the "
            "information is correct before doing anything else. When you ask for "
            "confirmation, mention both the panel ID and the stud ID. If my answer "
            f"is 'yes' or 'it's correct', reply exactly '{ACKNOWLEDGE_SENTINEL}'."
        ),
        clarification=(
            "If the information about the panel or the destination is missing, "
            "unclear, or inaccurate, ask me to provide accurate information. When "
            "I give two different IDs for the target or the destination, ask me "
            "which one is correct instead of picking one yourself."
        ),
        history=(
            "Remember the installation history when you confirm installation "
            "information. A panel that is already installed cannot be installed "
            "again, and a stud that already holds a panel cannot receive another "
            "one. When you refuse for either reason, explain why and mention the "
            f"currently available targets or destinations. Once I confirm and you "
            f"say '{ACKNOWLEDGE_SENTINEL}', assume the panel is installed on the stud."
        ),
        blank_inquiry=(
            "When I send a blank message, ask me again instead of guessing my "
            "intent. Do not make up scenarios about the situation."
        ),
    )
    return PromptSpec(
        role_context=role_context,
        material_inventory=material_inventory,
        destination_rules=destination_rules,
        instruction_blocks=blocks,
    )


# ---------------------------------------------------------------------------
# External LLM port
# ---------------------------------------------------------------------------

ENV_BASE_URL = "HRC_LLM_BASE_URL"
ENV_MODEL = "HRC_LLM_MODEL"
ENV_API_KEY = "HRC_LLM_API_KEY"

_REJECTION_MARKERS = (
    "cannot",
    "can't",
    "already",
    "not present",
    "does not exist",
    "doesn't exist",
    "not available",
    "no object",
    "no material",
    "should not",
    "must not",
)


@dataclass(frozen=True)
class LlmConfig:
    base_url: str
    model: str
    api_key: Optional[str] = None
    timeout_s: float = 30.0

    @classmethod
    def from_env(cls) -> "LlmConfig":
        base_url = os.environ.get(ENV_BASE_URL)
        model = os.environ.get(ENV_MODEL)
        if not base_url or not model:
            raise AssistantUnavailableError(
                f"LLM endpoint not configured: set {ENV_BASE_URL} and {ENV_MODEL} "
                f"(and {ENV_API_KEY} if the endpoint requires it)"
            )
        return cls(base_url=base_url, model=model, api_key=os.environ.get(ENV_API_KEY))


def classify_reply(text: str, scene: Scene) -> AssistantReply:
    """Sort free-form assistant text into a reply kind.

    Exact sentinel -> acknowledge; a question citing exactly one panel
    and one stud -> confirmation request; rejection markers -> rejection;
    anything else -> clarification.  Deliberately simple: the approval
    gate catches what this misses.
    """
    stripped = text.strip()
    if stripped == ACKNOWLEDGE_SENTINEL:
        return AssistantReply(text=text, kind=ReplyKind.ACKNOWLEDGE)
    panels, studs, _ = extract_ids(text, scene)
    if "?" in text and len(panels) == 1 and len(studs) == 1:
        return AssistantReply(
            text=text,
            kind=ReplyKind.CONFIRM_REQUEST,
            cited_ids=(panels[0], studs[0]),
        )
    lowered = text.lower()
    if any(marker in lowered for marker in _REJECTION_MARKERS):
        return AssistantReply(
            text=text,
            kind=ReplyKind.REJECTION,
            cited_ids=(
                panels[0] if len(panels) == 1 else None,
                studs[0] if len(studs) == 1 else None,
            ),
        )
    return AssistantReply(text=text, kind=ReplyKind.CLARIFICATION)


def llm_reply(
    prompt: PromptSpec,
    history: tuple[tuple[str, str], ...],
    message: str,
    config: LlmConfig,
    scene: Scene,
    client: Optional[httpx.Client] = None,
) -> AssistantReply:
    """One chat-completion round trip, classified into an AssistantReply.

    ``history`` holds (speaker, text) pairs with speakers ``user`` and
    ``robot``.  Decoding is requested at temperature 0.  Transport,
    auth, and schema failures raise :class:`AssistantUnavailableError`;
    they are never shaped into a reply.
    """
    messages = [{"role": "system", "content": prompt.render()}]
    for speaker, text in history:
        role = "user" if speaker == "user" else "assistant"
        messages.append({"role": role, "content": text})
    messages.append({"role": "user", "content": message})
    payload = {"model": config.model, "temperature": 0, "messages": messages}
    headers = {}
    if config.api_key:
        headers["Authorization"] = f"Bearer {config.api_key}"

    owned = client is None
    http = client or httpx.Client(timeout=config.timeout_s)
    try:
        response = http.post(
            config.base_url.rstrip("/") + "/chat/completions",
            json=payload,
            headers=headers,
        )
        response.raise_for_status()
        text = response.json()["choices"][0]["message"]["content"]
        if not isinstance(text, str):
            raise KeyError("content")
    except (httpx.HTTPError, KeyError, IndexError, TypeError, ValueError) as exc:
        raise AssistantUnavailableError(f"assistant endpoint failed: {exc}") from exc
    finally:
        if owned:
            http.close()
    return classify_reply(text, scene)


# ---------------------------------------------------------------------------
# Dialogue-facing ports
# ---------------------------------------------------------------------------

class RuleAssistant:
    """Deterministic validator-backed policy; no network, no surprises."""

    remote = False
    name = "rule"

    def reply(self, request: AssistantRequest) -> AssistantReply:
        return reference_reply(request.confirmation_pending, request.intent, request.verdict)


class LlmAssistant:
    """External-LLM policy speaking the prompt generated from the scene."""

    remote = True
    name = "llm"

    def __init__(
        self,
        scene: Scene,
        config: Optional[LlmConfig] = None,
        client: Optional[httpx.Client] = None,
    ):
        self._scene = scene
        self._config = config or LlmConfig.from_env()
        self._client = client
        self._prompt = build_prompt(scene)

    @property
    def prompt(self) -> PromptSpec:
        return self._prompt

    def reply(self, request: AssistantRequest) -> AssistantReply:
        return llm_reply(
            self._prompt,
            request.history,
            request.message,
            self._config,
            self._scene,
            client=self._client,
        )
