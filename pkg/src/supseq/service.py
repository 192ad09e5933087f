"""Interactive operator guidance over a synthesized supervisor.

Each session is a cursor into the supervisor: the operator requests task
starts and confirms task completions through the same step endpoint, can undo,
and can preview how many ways remain to finish from any position. Sessions
live in memory; a per-session lock serializes steps while distinct sessions
proceed independently. The supervisor automaton itself is shared read-only.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Sequence

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from supseq.automata import Automaton, State, state_label, with_initial
from supseq.dot import export_dot
from supseq.enumeration import count_sequences, enumerate_sequences
from supseq.modeling import TaskKind, TaskSpec

_OUTLOOK_SAMPLES = 5
_OUTLOOK_MAX_COUNT = 10_000


@dataclass
class GuidanceSession:
    """One operator's live position in the supervisor."""

    id: str
    state: State
    history: list[str] = field(default_factory=list)
    created: str = ""
    updated: str = ""
    lock: threading.Lock = field(default_factory=threading.Lock)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def create_app(
    supervisor: Automaton,
    tasks: Sequence[TaskSpec] = (),
    model_name: str = "supervisor",
) -> FastAPI:
    app = FastAPI(title="assembly guidance", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, GuidanceSession] = {}
    sessions_lock = threading.Lock()
    single_tasks = [t.name for t in tasks if t.kind is TaskKind.SINGLE]
    known_tasks = [t.name for t in tasks]

    def view(session: GuidanceSession) -> dict:
        controllable = []
        uncontrollable = []
        for ev in supervisor.enabled_events(session.state):
            (controllable if ev.controllable else uncontrollable).append(ev.name)
        done = [t for t in known_tasks if f"{t}_done" in session.history]
        marked = session.state in supervisor.marked
        completed = marked and all(f"{t}_done" in session.history for t in single_tasks)
        return {
            "id": session.id,
            "state": state_label(session.state),
            "enabled": {"controllable": controllable, "uncontrollable": uncontrollable},
            "history": list(session.history),
            "done_tasks": done,
            "completed": completed,
            "created": session.created,
            "updated": session.updated,
        }

    def get_session(session_id: str) -> GuidanceSession:
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.post("/sessions")
    def create_session() -> dict:
        stamp = _now()
        session = GuidanceSession(
            id=uuid.uuid4().hex,
            state=supervisor.initial,
            created=stamp,
            updated=stamp,
        )
        with sessions_lock:
            sessions[session.id] = session
        return view(session)

    @app.get("/sessions/{session_id}")
    def read_session(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            return view(session)

    @app.post("/sessions/{session_id}/step")
    def step(session_id: str, payload: dict = Body(...)) -> dict:
        if not isinstance(payload, dict) or not isinstance(payload.get("event"), str):
            raise HTTPException(status_code=400, detail="body must be {\"event\": \"<name>\"}")
        event = payload["event"]
        session = get_session(session_id)
        with session.lock:
            enabled = {ev.name for ev in supervisor.enabled_events(session.state)}
            if event not in enabled:
                raise HTTPException(
                    status_code=409,
                    detail=f"event {event!r} is not allowed here; enabled: {sorted(enabled)}",
                )
            session.state = supervisor.successor(session.state, event)
            session.history.append(event)
            session.updated = _now()
            return view(session)

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str) -> dict:
        session = get_session(session_id)
        with session.lock:
            if not session.history:
                raise HTTPException(status_code=409, detail="nothing to undo")
            session.history.pop()
            state = supervisor.initial
            for event in session.history:
                state = supervisor.successor(state, event)
            session.state = state
            session.updated = _now()
            return view(session)

    @app.get("/sessions/{session_id}/outlook")
    def outlook(session_id: str, max_len: int = 32, after: str | None = None) -> dict:
        session = get_session(session_id)
        with session.lock:
            state = session.state
            if after is not None:
                enabled = {ev.name for ev in supervisor.enabled_events(state)}
                if after not in enabled:
                    raise HTTPException(
                        status_code=409,
                        detail=f"event {after!r} is not allowed here",
                    )
                state = supervisor.successor(state, after)
        rerooted = with_initial(supervisor, state)
        remaining = count_sequences(rerooted)
        listing = enumerate_sequences(rerooted, max_len=max_len, max_count=_OUTLOOK_MAX_COUNT)
        return {
            "remaining_sequence_count": remaining,
            "language_infinite": listing.language_infinite,
            "bounded_sequence_count": len(listing.sequences),
            "bound_used": listing.bound_used,
            "sample_completions": [list(t) for t in listing.sequences[:_OUTLOOK_SAMPLES]],
        }

    @app.get("/model")
    def model(highlight: str | None = None) -> dict:
        return {
            "name": model_name,
            "states": len(supervisor.states),
            "transitions": supervisor.n_transitions,
            "events": [
                {"name": ev.name, "controllable": ev.controllable}
                for ev in supervisor.events
            ],
            "initial": state_label(supervisor.initial),
            "marked": [state_label(s) for s in supervisor.states if s in supervisor.marked],
            "tasks": [{"name": t.name, "kind": t.kind.value} for t in tasks],
            "dot": export_dot(supervisor, current=highlight),
        }

    return app
