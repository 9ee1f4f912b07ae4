"""HTTP + WebSocket service hosting dialogue sessions.

REST surface (JSON bodies):

* ``POST /session`` ``{"scene": path?, "assistant": "rule"|"llm"?}``
* ``POST /session/{id}/send`` ``{"utterance": str}``
* ``POST /session/{id}/select`` ``{"object_id": int}``
* ``POST /session/{id}/approve``
* ``GET /session/{id}`` — state, transcript, scene snapshot
* ``WS /session/{id}/events`` — frames ``{"type": "reply" | "robot" |
  "highlight" | "state", ...}``

Each session owns its scene lineage and a robot simulator.  With a
per-phase delay of zero the robot runs inline inside the approve request
(deterministic for tests); with a positive delay it runs on a background
thread and progress arrives over the event stream.  When an operator UI
bundle directory is configured it is served statically under ``/ui``.
"""

from __future__ import annotations

import asyncio
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .assistant import (
    AssistantReply,
    AssistantUnavailableError,
    LlmAssistant,
    LlmConfig,
    RuleAssistant,
)
from .dialogue import DialogueSession, SessionBusyError, SessionError, SessionStateError
from .fusion import NonInteractableError, SelectionHighlight
from .robot import RobotEvent, RobotSimulator, execute_task
from .scene import Scene, UnknownObjectError, load_scene_file
from .validation import Verdict

ASSISTANT_MODES = ("rule", "llm")


class ServiceConfigError(Exception):
    pass


@dataclass
class ServiceConfig:
    scene_path: str
    assistant_mode: str = "rule"
    phase_delay: float = 0.0
    inject_fault: bool = False
    ui_dir: Optional[str] = None
    llm: Optional[LlmConfig] = None


class SessionHub:
    """Fan-out of event frames to every WebSocket subscribed to a session."""

    def __init__(self) -> None:
        self._subscribers: list[tuple[asyncio.AbstractEventLoop, asyncio.Queue]] = []
        self._lock = threading.Lock()

    def subscribe(self, loop: asyncio.AbstractEventLoop) -> asyncio.Queue:
        queue: asyncio.Queue = asyncio.Queue()
        with self._lock:
            self._subscribers.append((loop, queue))
        return queue

    def unsubscribe(self, queue: asyncio.Queue) -> None:
        with self._lock:
            self._subscribers = [(l, q) for (l, q) in self._subscribers if q is not queue]

    def publish(self, frame: dict) -> None:
        with self._lock:
            subscribers = list(self._subscribers)
        for loop, queue in subscribers:
            loop.call_soon_threadsafe(queue.put_nowait, frame)


@dataclass
class SessionRuntime:
    session: DialogueSession
    simulator: RobotSimulator
    hub: SessionHub = field(default_factory=SessionHub)


def scene_snapshot(scene: Scene) -> dict:
    objects = []
    for obj in sorted(scene.objects.values(), key=lambda o: o.id):
        objects.append(
            {
                "id": obj.id,
                "kind": obj.kind.value,
                "name": obj.name,
                "size_ft": list(obj.size_ft) if obj.size_ft else None,
                "area_label": obj.area_label.value if obj.area_label else None,
                "allowed_panel_size": (
                    list(obj.allowed_panel_size) if obj.allowed_panel_size else None
                ),
                "installed_on": obj.installed_on,
                "occupied_by": obj.occupied_by,
                "destination": obj.is_destination,
            }
        )
    return {"objects": objects}


def state_frame(session: DialogueSession) -> dict:
    return {
        "type": "state",
        "session": session.id,
        "state": session.state.value,
        "approve_enabled": session.state.value == "ready_for_approval",
        "pending_task": list(session.pending_task) if session.pending_task else None,
        "pending_selections": {
            role.value: object_id
            for role, object_id in session.pending_selections.pending().items()
        },
        "elapsed_s": round(session.elapsed_s, 3),
        "scene": scene_snapshot(session.scene),
    }


def reply_frame(reply: AssistantReply) -> dict:
    return {
        "type": "reply",
        "kind": reply.kind.value,
        "text": reply.text,
        "cited_ids": list(reply.cited_ids),
        "category": reply.category.value if isinstance(reply.category, Verdict) else None,
    }


def highlight_frame(highlight: SelectionHighlight) -> dict:
    return {
        "type": "highlight",
        "object_id": highlight.object_id,
        "role": highlight.role.value,
    }


def robot_frame(event: RobotEvent) -> dict:
    return {
        "type": "robot",
        "phase": event.phase.value,
        "target_id": event.task.target_id,
        "destination_id": event.task.destination_id,
        "sequence": event.sequence,
        "detail": event.detail,
    }


class CreateSessionBody(BaseModel):
    scene: Optional[str] = None
    assistant: Optional[str] = None


class SendBody(BaseModel):
    utterance: str = ""


class SelectBody(BaseModel):
    object_id: int


def _session_error(exc: SessionError) -> HTTPException:
    status = 409 if isinstance(exc, (SessionBusyError, SessionStateError)) else 400
    return HTTPException(status_code=status, detail=str(exc))


def create_app(config: ServiceConfig) -> FastAPI:
    if config.assistant_mode not in ASSISTANT_MODES:
        raise ServiceConfigError(f"unknown assistant mode {config.assistant_mode!r}")
    default_scene = load_scene_file(config.scene_path)
    llm_config = config.llm
    if config.assistant_mode == "llm" and llm_config is None:
        try:
            llm_config = LlmConfig.from_env()
        except AssistantUnavailableError as exc:
            raise ServiceConfigError(str(exc)) from exc

    app = FastAPI(title="hrc orchestrator")
    sessions: dict[str, SessionRuntime] = {}
    registry_lock = threading.Lock()

    def make_assistant(mode: str, scene: Scene):
        if mode == "rule":
            return RuleAssistant()
        if mode == "llm":
            cfg = llm_config
            if cfg is None:
                try:
                    cfg = LlmConfig.from_env()
                except AssistantUnavailableError as exc:
                    raise HTTPException(status_code=503, detail=str(exc)) from exc
            return LlmAssistant(scene, config=cfg)
        raise HTTPException(status_code=400, detail=f"unknown assistant mode {mode!r}")

    def get_runtime(session_id: str) -> SessionRuntime:
        with registry_lock:
            runtime = sessions.get(session_id)
        if runtime is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return runtime

    @app.post("/session")
    def create_session(body: CreateSessionBody):
        scene = default_scene
        if body.scene:
            try:
                scene = load_scene_file(body.scene)
            except OSError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        mode = body.assistant or config.assistant_mode
        session = DialogueSession(scene, make_assistant(mode, scene))
        hub = SessionHub()
        simulator = RobotSimulator(
            on_event=lambda event: hub.publish(robot_frame(event)),
            phase_delay=config.phase_delay,
            inject_fault=config.inject_fault,
        )
        runtime = SessionRuntime(session=session, simulator=simulator, hub=hub)
        with registry_lock:
            sessions[session.id] = runtime
        return {"id": session.id, "state": session.state.value, "assistant": mode}

    @app.get("/session/{session_id}")
    def get_session(session_id: str):
        runtime = get_runtime(session_id)
        session = runtime.session
        payload = state_frame(session)
        payload["transcript"] = [
            {"speaker": e.speaker, "text": e.text, "timestamp": e.timestamp}
            for e in session.transcript
        ]
        return payload

    @app.post("/session/{session_id}/send")
    def send_message(session_id: str, body: SendBody):
        runtime = get_runtime(session_id)
        try:
            reply = runtime.session.submit(body.utterance)
        except SessionError as exc:
            raise _session_error(exc) from exc
        except AssistantUnavailableError as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        frame = reply_frame(reply)
        runtime.hub.publish(frame)
        runtime.hub.publish(state_frame(runtime.session))
        return {"reply": frame, "state": runtime.session.state.value}

    @app.post("/session/{session_id}/select")
    def select_object(session_id: str, body: SelectBody):
        runtime = get_runtime(session_id)
        try:
            highlight = runtime.session.select(body.object_id)
        except UnknownObjectError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except NonInteractableError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except SessionError as exc:
            raise _session_error(exc) from exc
        frame = highlight_frame(highlight)
        runtime.hub.publish(frame)
        runtime.hub.publish(state_frame(runtime.session))
        return {"highlight": frame, "state": runtime.session.state.value}

    @app.post("/session/{session_id}/approve")
    def approve(session_id: str):
        runtime = get_runtime(session_id)
        session = runtime.session
        try:
            task = session.approve()
        except SessionError as exc:
            raise _session_error(exc) from exc
        runtime.hub.publish(state_frame(session))

        def run() -> None:
            execute_task(session, runtime.simulator, task)
            runtime.hub.publish(state_frame(session))

        if config.phase_delay > 0:
            threading.Thread(target=run, daemon=True).start()
        else:
            run()
        return {
            "task": {
                "action": task.action,
                "target_id": task.target_id,
                "destination_id": task.destination_id,
                "session": task.session,
            },
            "state": session.state.value,
        }

    @app.websocket("/session/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        with registry_lock:
            runtime = sessions.get(session_id)
        if runtime is None:
            await websocket.close(code=1008)
            return
        await websocket.accept()
        queue = runtime.hub.subscribe(asyncio.get_running_loop())
        try:
            await websocket.send_json(state_frame(runtime.session))
            while True:
                frame = await queue.get()
                await websocket.send_json(frame)
        except WebSocketDisconnect:
            pass
        finally:
            runtime.hub.unsubscribe(queue)

    if config.ui_dir and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

        @app.get("/")
        def index():
            return RedirectResponse(url="/ui/")

    return app
