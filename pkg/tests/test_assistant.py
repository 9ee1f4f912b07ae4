from __future__ import annotations

import json

import httpx
import pytest

from hrc.assistant import (
    ACKNOWLEDGE_SENTINEL,
    AssistantRequest,
    AssistantUnavailableError,
    LlmAssistant,
    LlmConfig,
    PromptError,
    ReplyKind,
    RuleAssistant,
    build_prompt,
    classify_reply,
    llm_reply,
    reference_reply,
)
from hrc.parsing import Action, Ambiguity, ParsedIntent, extract_ids
from hrc.scene import load_scene
from hrc.validation import Verdict, validate, validate_pair


def pick_place(target=None, destination=None, ambiguity=Ambiguity.NONE, unknown=()):
    return ParsedIntent(
        action=Action.PICK_PLACE,
        target_refs=(target,) if isinstance(target, int) else tuple(target or ()),
        destination_refs=(
            (destination,) if isinstance(destination, int) else tuple(destination or ())
        ),
        ambiguity=ambiguity,
        unknown_refs=tuple(unknown),
    )


# ---------------------------------------------------------------------------
# Reference policy
# ---------------------------------------------------------------------------

def test_confirm_request_cites_both_ids(scene):
    intent = pick_place(504, 606)
    reply = reference_reply(False, intent, validate(scene, intent))
    assert reply.kind is ReplyKind.CONFIRM_REQUEST
    assert reply.cited_ids == (504, 606)
    assert "?" in reply.text
    # extraction round-trip recovers exactly the cited pair
    panels, studs, unknown = extract_ids(reply.text, scene)
    assert (panels, studs, unknown) == ([504], [606], [])


def test_confirm_then_acknowledge():
    reply = reference_reply(True, ParsedIntent(action=Action.CONFIRM), None)
    assert reply.kind is ReplyKind.ACKNOWLEDGE
    assert reply.text == "OKAY!!!"


def test_confirm_without_pending_task_reasks():
    reply = reference_reply(False, ParsedIntent(action=Action.CONFIRM), None)
    assert reply.kind is ReplyKind.REASK


def test_blank_reasks():
    intent = ParsedIntent(action=Action.UNKNOWN, ambiguity=Ambiguity.BLANK)
    reply = reference_reply(False, intent, None)
    assert reply.kind is ReplyKind.REASK
    assert reply.text == "How can I assist you further?"


def test_deny_requests_correction():
    reply = reference_reply(True, ParsedIntent(action=Action.DENY), None)
    assert reply.kind is ReplyKind.CLARIFICATION


def test_mismatch_rejection_suggests_alternative(scene):
    intent = pick_place(504, 605)
    reply = reference_reply(False, intent, validate(scene, intent))
    assert reply.kind is ReplyKind.REJECTION
    assert "panel 504 on stud 606 instead?" in reply.text
    assert reply.category is Verdict.MISMATCHED_PAIRING


def test_rejection_lists_alternatives(scene):
    intent = pick_place(502, 606)
    reply = reference_reply(False, intent, validate(scene, intent))
    assert reply.kind is ReplyKind.REJECTION
    assert "602, 604 and 608" in reply.text


def test_clarification_names_conflicting_ids(scene):
    intent = pick_place([501, 502], 602, ambiguity=Ambiguity.CONFLICTING_TARGETS)
    reply = reference_reply(False, intent, validate(scene, intent))
    assert reply.kind is ReplyKind.CLARIFICATION
    assert "501" in reply.text and "502" in reply.text
    assert reply.category is Verdict.PARTIAL_OR_DUPLICATE


def test_policy_is_deterministic(scene):
    intent = pick_place(501, 602)
    verdict = validate(scene, intent)
    first = reference_reply(False, intent, verdict)
    second = reference_reply(False, intent, verdict)
    assert first == second


# ---------------------------------------------------------------------------
# Prompt generation
# ---------------------------------------------------------------------------

def test_prompt_inventory_pairs(scene):
    prompt = build_prompt(scene)
    assert "(504, 4 by 4)" in prompt.material_inventory
    assert "(501, 4 by 8)" in prompt.material_inventory


def test_prompt_size_rules(scene):
    rules = build_prompt(scene).destination_rules
    assert "4 by 8" in rules and "602, 604 and 608" in rules
    assert "4 by 4" in rules and "stud 606" in rules
    assert "601, 603, 605, 607 and 609" in rules


def test_prompt_area_mapping(scene):
    rules = build_prompt(scene).destination_rules
    assert "Stud 602 is at the center of the leftmost destination area." in rules
    assert "Stud 606 is at the center of the second rightmost destination area." in rules


def test_prompt_mentions_every_object(scene):
    rendered = build_prompt(scene).render()
    for object_id in list(range(501, 505)) + list(range(601, 610)):
        assert str(object_id) in rendered


def test_prompt_instruction_blocks(scene):
    blocks = build_prompt(scene).instruction_blocks
    assert ACKNOWLEDGE_SENTINEL in blocks.verification
    assert "which one is correct" in blocks.clarification
    assert "history" in blocks.history
    assert "ask me again" in blocks.blank_inquiry


def test_prompt_requires_materials():
    empty = load_scene('{"objects": [], "metadata": {}}')
    with pytest.raises(PromptError):
        build_prompt(empty)


def test_prompt_deterministic(scene):
    assert build_prompt(scene).render() == build_prompt(scene).render()


# ---------------------------------------------------------------------------
# LLM reply classification and transport
# ---------------------------------------------------------------------------

def test_classify_sentinel(scene):
    reply = classify_reply("OKAY!!!", scene)
    assert reply.kind is ReplyKind.ACKNOWLEDGE


def test_classify_confirm_request(scene):
    text = "You want panel 501 placed on stud 602, correct?"
    reply = classify_reply(text, scene)
    assert reply.kind is ReplyKind.CONFIRM_REQUEST
    assert reply.cited_ids == (501, 602)


def test_classify_rejection(scene):
    text = (
        "Panel 501 cannot be installed on stud 608 because panel 503 is "
        "already installed there."
    )
    assert classify_reply(text, scene).kind is ReplyKind.REJECTION


def test_classify_default_clarification(scene):
    text = "Could you tell me more about the panel you mean?"
    assert classify_reply(text, scene).kind is ReplyKind.CLARIFICATION


def _mock_client(handler):
    return httpx.Client(transport=httpx.MockTransport(handler))


def _completion(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def test_llm_reply_round_trip(scene):
    captured = {}

    def handler(request):
        captured["payload"] = json.loads(request.content.decode())
        captured["url"] = str(request.url)
        captured["auth"] = request.headers.get("authorization")
        return _completion("OKAY!!!")

    config = LlmConfig(base_url="http://llm.test/v1", model="gpt-test", api_key="sk-x")
    prompt = build_prompt(scene)
    history = (("user", "Panel 504 to stud 606"), ("robot", "Is that correct?"))
    reply = llm_reply(prompt, history, "yes", config, scene, client=_mock_client(handler))

    assert reply.kind is ReplyKind.ACKNOWLEDGE
    assert captured["url"] == "http://llm.test/v1/chat/completions"
    assert captured["auth"] == "Bearer sk-x"
    payload = captured["payload"]
    assert payload["model"] == "gpt-test"
    assert payload["temperature"] == 0
    assert payload["messages"][0]["role"] == "system"
    assert payload["messages"][0]["content"] == prompt.render()
    assert [m["role"] for m in payload["messages"][1:]] == ["user", "assistant", "user"]
    assert payload["messages"][-1]["content"] == "yes"


def test_llm_transport_failure_is_unavailable(scene):
    def handler(request):
        raise httpx.ConnectError("no route to host")

    config = LlmConfig(base_url="http://llm.test", model="m")
    with pytest.raises(AssistantUnavailableError):
        llm_reply(build_prompt(scene), (), "hi", config, scene, client=_mock_client(handler))


def test_llm_auth_failure_is_unavailable(scene):
    def handler(request):
        return httpx.Response(401, json={"error": "bad key"})

    config = LlmConfig(base_url="http://llm.test", model="m")
    with pytest.raises(AssistantUnavailableError):
        llm_reply(build_prompt(scene), (), "hi", config, scene, client=_mock_client(handler))


def test_llm_config_from_env_requires_settings(monkeypatch):
    for name in ("HRC_LLM_BASE_URL", "HRC_LLM_MODEL", "HRC_LLM_API_KEY"):
        monkeypatch.delenv(name, raising=False)
    with pytest.raises(AssistantUnavailableError):
        LlmConfig.from_env()
    monkeypatch.setenv("HRC_LLM_BASE_URL", "http://llm.test")
    monkeypatch.setenv("HRC_LLM_MODEL", "gpt-test")
    config = LlmConfig.from_env()
    assert config.model == "gpt-test"


# ---------------------------------------------------------------------------
# Dialogue-facing ports
# ---------------------------------------------------------------------------

def test_rule_assistant_port(scene):
    intent = pick_place(504, 606)
    request = AssistantRequest(
        intent=intent,
        verdict=validate_pair(scene, 504, 606),
        message="Panel 504 to stud 606.",
    )
    assert RuleAssistant().reply(request).kind is ReplyKind.CONFIRM_REQUEST
    assert RuleAssistant().remote is False


def test_llm_assistant_port(scene):
    def handler(request):
        return _completion("You want panel 504 on stud 606, is that correct?")

    assistant = LlmAssistant(
        scene,
        config=LlmConfig(base_url="http://llm.test", model="m"),
        client=_mock_client(handler),
    )
    request = AssistantRequest(intent=pick_place(), verdict=None, message="hello")
    reply = assistant.reply(request)
    assert reply.kind is ReplyKind.CONFIRM_REQUEST
    assert reply.cited_ids == (504, 606)
    assert assistant.remote is True
