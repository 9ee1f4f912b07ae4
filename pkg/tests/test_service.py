from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from conftest import SCENE_PATH

from hrc.service import ServiceConfig, ServiceConfigError, create_app


@pytest.fixture
def client():
    app = create_app(ServiceConfig(scene_path=str(SCENE_PATH)))
    with TestClient(app) as test_client:
        yield test_client


def create_session(client) -> str:
    response = client.post("/session", json={})
    assert response.status_code == 200
    body = response.json()
    assert body["state"] == "awaiting_instruction"
    return body["id"]


def test_create_and_fetch_session(client):
    session_id = create_session(client)
    response = client.get(f"/session/{session_id}")
    assert response.status_code == 200
    body = response.json()
    assert body["state"] == "awaiting_instruction"
    assert body["approve_enabled"] is False
    assert body["transcript"] == []
    assert len(body["scene"]["objects"]) == 13
    assert body["elapsed_s"] >= 0


def test_unknown_session_is_404(client):
    assert client.get("/session/nope").status_code == 404
    assert client.post("/session/nope/send", json={"utterance": "hi"}).status_code == 404


def test_send_and_approve_flow(client):
    session_id = create_session(client)
    response = client.post(
        f"/session/{session_id}/send", json={"utterance": "Panel 504 to stud 606"}
    )
    assert response.status_code == 200
    assert response.json()["reply"]["kind"] == "confirm_request"
    assert response.json()["state"] == "awaiting_confirmation"

    response = client.post(f"/session/{session_id}/send", json={"utterance": "yes"})
    assert response.json()["reply"]["text"] == "OKAY!!!"
    assert response.json()["state"] == "ready_for_approval"

    state = client.get(f"/session/{session_id}").json()
    assert state["approve_enabled"] is True

    response = client.post(f"/session/{session_id}/approve")
    assert response.status_code == 200
    body = response.json()
    assert body["task"] == {
        "action": "pick_place",
        "target_id": 504,
        "destination_id": 606,
        "session": session_id,
    }
    # zero phase delay: the robot ran inline and the scene is updated
    assert body["state"] == "awaiting_instruction"
    state = client.get(f"/session/{session_id}").json()
    objects = {o["id"]: o for o in state["scene"]["objects"]}
    assert objects[504]["installed_on"] == 606
    assert objects[606]["occupied_by"] == 504


def test_approve_before_acknowledge_is_409(client):
    session_id = create_session(client)
    assert client.post(f"/session/{session_id}/approve").status_code == 409


def test_select_endpoints(client):
    session_id = create_session(client)
    response = client.post(f"/session/{session_id}/select", json={"object_id": 501})
    assert response.status_code == 200
    assert response.json()["highlight"] == {
        "type": "highlight",
        "object_id": 501,
        "role": "target",
    }
    # plain framing stud is not interactable
    assert (
        client.post(f"/session/{session_id}/select", json={"object_id": 605}).status_code
        == 409
    )
    # unknown object
    assert (
        client.post(f"/session/{session_id}/select", json={"object_id": 999}).status_code
        == 404
    )
    state = client.get(f"/session/{session_id}").json()
    assert state["pending_selections"] == {"target": 501}


def test_multimodal_flow_over_http(client):
    session_id = create_session(client)
    client.post(f"/session/{session_id}/select", json={"object_id": 501})
    client.post(f"/session/{session_id}/select", json={"object_id": 602})
    response = client.post(
        f"/session/{session_id}/send", json={"utterance": "install this here"}
    )
    body = response.json()
    assert body["reply"]["kind"] == "confirm_request"
    assert body["reply"]["cited_ids"] == [501, 602]
    # selections were consumed by the send
    state = client.get(f"/session/{session_id}").json()
    assert state["pending_selections"] == {}


def test_websocket_event_stream(client):
    session_id = create_session(client)
    with client.websocket_connect(f"/session/{session_id}/events") as ws:
        first = ws.receive_json()
        assert first["type"] == "state"
        assert first["state"] == "awaiting_instruction"

        client.post(f"/session/{session_id}/select", json={"object_id": 504})
        frame = ws.receive_json()
        assert frame == {"type": "highlight", "object_id": 504, "role": "target"}
        assert ws.receive_json()["type"] == "state"

        client.post(f"/session/{session_id}/send", json={"utterance": "place it on 606"})
        reply = ws.receive_json()
        assert reply["type"] == "reply" and reply["kind"] == "confirm_request"
        state = ws.receive_json()
        assert state["state"] == "awaiting_confirmation"
        assert state["pending_task"] == [504, 606]

        client.post(f"/session/{session_id}/send", json={"utterance": "yes"})
        assert ws.receive_json()["text"] == "OKAY!!!"
        assert ws.receive_json()["approve_enabled"] is True

        client.post(f"/session/{session_id}/approve")
        frames = [ws.receive_json() for _ in range(6)]
        robot_phases = [f["phase"] for f in frames if f["type"] == "robot"]
        assert robot_phases == ["accepted", "picking", "placing", "done"]
        states = [f for f in frames if f["type"] == "state"]
        assert states[-1]["state"] == "awaiting_instruction"
        objects = {o["id"]: o for o in states[-1]["scene"]["objects"]}
        assert objects[504]["installed_on"] == 606


def test_blank_send_reasks(client):
    session_id = create_session(client)
    response = client.post(f"/session/{session_id}/send", json={"utterance": ""})
    assert response.json()["reply"]["kind"] == "reask"
    assert response.json()["reply"]["text"] == "How can I assist you further?"


def test_llm_mode_without_credentials_fails_startup(monkeypatch):
    for name in ("HRC_LLM_BASE_URL", "HRC_LLM_MODEL", "HRC_LLM_API_KEY"):
        monkeypatch.delenv(name, raising=False)
    with pytest.raises(ServiceConfigError):
        create_app(ServiceConfig(scene_path=str(SCENE_PATH), assistant_mode="llm"))


def test_unknown_assistant_mode_rejected():
    with pytest.raises(ServiceConfigError):
        create_app(ServiceConfig(scene_path=str(SCENE_PATH), assistant_mode="oracle"))


def test_fault_injection_rolls_back_over_http():
    app = create_app(ServiceConfig(scene_path=str(SCENE_PATH), inject_fault=True))
    with TestClient(app) as client:
        session_id = create_session(client)
        client.post(f"/session/{session_id}/send", json={"utterance": "Panel 504 to stud 606"})
        client.post(f"/session/{session_id}/send", json={"utterance": "yes"})
        response = client.post(f"/session/{session_id}/approve")
        assert response.json()["state"] == "awaiting_instruction"
        state = client.get(f"/session/{session_id}").json()
        objects = {o["id"]: o for o in state["scene"]["objects"]}
        assert objects[504]["installed_on"] is None
        transcript = state["transcript"]
        assert any("task failed" in e["text"] for e in transcript if e["speaker"] == "system")
