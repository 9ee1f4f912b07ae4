"""Multimodal human-robot collaboration orchestrator.

Fuses natural-language commands with pointing selections, validates
instructions against scene constraints and installation history, runs a
confirm-then-approve dialogue, and dispatches approved pick-and-place
tasks to a simulated robot over a JSON wire protocol.
"""

from .assistant import (
    AssistantReply,
    AssistantUnavailableError,
    LlmAssistant,
    LlmConfig,
    ReplyKind,
    RuleAssistant,
    build_prompt,
    reference_reply,
)
from .dialogue import DialogueSession, SessionState, TaskCommand
from .fusion import SelectionBatch, SelectionRole, compose, record_selection
from .harness import (
    DetectionReport,
    EvalCorpus,
    eval_corpus,
    load_corpus,
    load_corpus_file,
    run_script,
    word_count_metrics,
)
from .parsing import Action, Ambiguity, ParsedIntent, parse_command, resolve_area_phrase
from .robot import Phase, RobotEvent, RobotSimulator, decode, encode
from .scene import (
    ObjectKind,
    Scene,
    SceneObject,
    apply_install,
    available,
    load_scene,
    load_scene_file,
    lookup,
    serialize_scene,
)
from .validation import ValidationResult, Verdict, enumerate_verdicts, validate

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Ambiguity",
    "AssistantReply",
    "AssistantUnavailableError",
    "DetectionReport",
    "DialogueSession",
    "EvalCorpus",
    "LlmAssistant",
    "LlmConfig",
    "ObjectKind",
    "ParsedIntent",
    "Phase",
    "ReplyKind",
    "RobotEvent",
    "RobotSimulator",
    "RuleAssistant",
    "Scene",
    "SceneObject",
    "SelectionBatch",
    "SelectionRole",
    "SessionState",
    "TaskCommand",
    "ValidationResult",
    "Verdict",
    "apply_install",
    "available",
    "build_prompt",
    "compose",
    "decode",
    "encode",
    "enumerate_verdicts",
    "eval_corpus",
    "load_corpus",
    "load_corpus_file",
    "load_scene",
    "load_scene_file",
    "lookup",
    "parse_command",
    "resolve_area_phrase",
    "record_selection",
    "reference_reply",
    "run_script",
    "serialize_scene",
    "validate",
    "word_count_metrics",
]
