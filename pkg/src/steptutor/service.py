"""HTTP service: exercises, hint generation, rating capture, solution checks.

Students are identified only by a random-number alias; every interaction
is appended to the session's event log, from which all service state can
be replayed. Hints are deliberately regenerable: asking twice for the same
code yields two independent hints.
"""

from __future__ import annotations

import random
import time
import uuid
from dataclasses import dataclass
from typing import Iterable

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .events import EventStore, SessionEvent
from .exercises import CheckResult, Exercise, RunnerConfig, check_solution
from .llm import CompletionRequest, CredentialError, LlmClient, LlmError, default_model_id
from .prompts import default_spec, render_prompt

__all__ = ["Session", "HintRecord", "ServiceState", "create_app"]


@dataclass
class Session:
    session_id: str
    participant_alias: str
    exercise_id: str
    started_at: int


@dataclass
class HintRecord:
    hint_id: str
    session_id: str
    code_snapshot: str
    prompt_text: str
    text: str
    model_id: str
    created_at: int


class ServiceState:
    """Sessions, hints and ratings, derivable by replaying the event log."""

    def __init__(self) -> None:
        self.sessions: dict[str, Session] = {}
        self.hints: dict[str, HintRecord] = {}
        self.ratings: dict[str, dict] = {}

    def apply(self, event: SessionEvent) -> None:
        payload = event.payload
        if event.kind == "session_started":
            self.sessions[event.session_id] = Session(
                session_id=event.session_id,
                participant_alias=payload["participant_alias"],
                exercise_id=payload["exercise_id"],
                started_at=payload["started_at"],
            )
        elif event.kind == "hint_issued":
            self.hints[payload["hint_id"]] = HintRecord(
                hint_id=payload["hint_id"],
                session_id=event.session_id,
                code_snapshot=payload["code_snapshot"],
                prompt_text=payload["prompt"]["text"],
                text=payload["text"],
                model_id=payload["model_id"],
                created_at=payload["created_at"],
            )
        elif event.kind == "hint_rated":
            self.ratings[payload["hint_id"]] = {
                "clear": payload["clear"],
                "fits": payload["fits"],
                "helpful": payload["helpful"],
                "comment": payload.get("comment"),
            }

    @classmethod
    def replay(cls, events: Iterable[SessionEvent]) -> "ServiceState":
        state = cls()
        for event in events:
            state.apply(event)
        return state

    @classmethod
    def from_store(cls, store: EventStore) -> "ServiceState":
        state = cls()
        for session_id in store.session_ids():
            for event in store.events(session_id):
                state.apply(event)
        return state


class StartSessionBody(BaseModel):
    exercise_id: str
    participant_alias: str | None = None


class SourceBody(BaseModel):
    source: str


class RatingBody(BaseModel):
    clear: int = Field(ge=1, le=5)
    fits: int = Field(ge=1, le=5)
    helpful: int = Field(ge=1, le=5)
    comment: str | None = None


def _validate_alias(alias: str | None) -> str:
    if alias is None or alias == "":
        return f"{random.randint(0, 999999):06d}"
    if not alias.isdigit() or len(alias) > 32:
        raise HTTPException(
            status_code=422,
            detail="participant_alias must be a number of at most 32 digits",
        )
    return alias


def create_app(
    catalog: list[Exercise],
    store: EventStore,
    client: LlmClient,
    model_id: str | None = None,
    runner: RunnerConfig | None = None,
) -> FastAPI:
    app = FastAPI(title="steptutor")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    exercises = {e.id: e for e in catalog}
    state = ServiceState.from_store(store)
    model = model_id or default_model_id()
    runner = runner or RunnerConfig.load()

    app.state.store = store
    app.state.service_state = state

    @app.get("/api/exercises")
    def list_exercises() -> list[dict]:
        return [
            {
                "id": e.id,
                "title": e.title,
                "description": e.description,
                "starter_code": e.starter_code,
            }
            for e in catalog
        ]

    @app.post("/api/sessions", status_code=201)
    def start_session(body: StartSessionBody) -> dict:
        if body.exercise_id not in exercises:
            raise HTTPException(status_code=404, detail=f"unknown exercise {body.exercise_id!r}")
        alias = _validate_alias(body.participant_alias)
        session_id = str(uuid.uuid4())
        event = store.append(
            "session_started",
            session_id,
            {
                "participant_alias": alias,
                "exercise_id": body.exercise_id,
                "started_at": int(time.time() * 1000),
            },
        )
        state.apply(event)
        session = state.sessions[session_id]
        return {
            "session_id": session.session_id,
            "participant_alias": session.participant_alias,
            "exercise_id": session.exercise_id,
            "started_at": session.started_at,
        }

    def _get_session(session_id: str) -> Session:
        session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.post("/api/sessions/{session_id}/hints")
    def request_hint(session_id: str, body: SourceBody) -> dict:
        session = _get_session(session_id)
        exercise = exercises[session.exercise_id]
        spec = default_spec()
        prompt = render_prompt(spec, exercise, body.source)
        request = CompletionRequest(
            prompt_text=prompt.text,
            temperature=spec.temperature,
            model_id=model,
        )
        try:
            response = client.complete(request)
        except CredentialError:
            raise HTTPException(
                status_code=503, detail="hint generation is not configured"
            )
        except LlmError:
            raise HTTPException(
                status_code=502,
                detail="hint generation temporarily unavailable; please retry shortly",
            )
        store.append("snapshot_logged", session_id, {"source": body.source})
        hint_id = str(uuid.uuid4())
        event = store.append(
            "hint_issued",
            session_id,
            {
                "hint_id": hint_id,
                "code_snapshot": body.source,
                "prompt": {
                    "text": prompt.text,
                    "spec": spec.to_json(),
                    "exercise_id": prompt.exercise_id,
                    "code_hash": prompt.code_hash,
                },
                "text": response.text,
                "model_id": response.model_id,
                "created_at": int(time.time() * 1000),
            },
        )
        state.apply(event)
        hint = state.hints[hint_id]
        return {
            "hint_id": hint.hint_id,
            "session_id": hint.session_id,
            "text": hint.text,
            "model_id": hint.model_id,
            "created_at": hint.created_at,
        }

    @app.post("/api/hints/{hint_id}/rating")
    def rate_hint(hint_id: str, body: RatingBody) -> dict:
        hint = state.hints.get(hint_id)
        if hint is None:
            raise HTTPException(status_code=404, detail=f"unknown hint {hint_id!r}")
        if hint_id in state.ratings:
            raise HTTPException(status_code=409, detail="hint already rated")
        event = store.append(
            "hint_rated",
            hint.session_id,
            {
                "hint_id": hint_id,
                "clear": body.clear,
                "fits": body.fits,
                "helpful": body.helpful,
                "comment": body.comment,
            },
        )
        state.apply(event)
        return {"status": "recorded", "hint_id": hint_id}

    @app.post("/api/sessions/{session_id}/check")
    def check(session_id: str, body: SourceBody) -> dict:
        session = _get_session(session_id)
        exercise = exercises[session.exercise_id]
        result: CheckResult = check_solution(exercise, body.source, runner)
        store.append("snapshot_logged", session_id, {"source": body.source})
        store.append(
            "solution_checked",
            session_id,
            {
                "passed": result.passed,
                "tests_passed": sum(1 for t in result.per_test if t.passed),
                "tests_total": len(result.per_test),
            },
        )
        return {
            "passed": result.passed,
            "per_test": [
                {
                    "name": t.name,
                    "passed": t.passed,
                    "actual_stdout": t.actual_stdout,
                    "stderr": t.stderr,
                    "timed_out": t.timed_out,
                }
                for t in result.per_test
            ],
        }

    @app.get("/api/export")
    def export(session: str = "all") -> PlainTextResponse:
        try:
            lines = list(store.export_lines(None if session == "all" else session))
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session!r}")
        body = "\n".join(lines)
        if body:
            body += "\n"
        return PlainTextResponse(body, media_type="application/x-ndjson")

    return app
