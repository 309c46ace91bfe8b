"""HTTP turn service: a thin JSON adapter over the engine."""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field

from .engine import Engine
from .store import StaleWriteError


class TurnRequest(BaseModel):
    session_id: str = Field(min_length=1)
    user_utterance: str
    config_overrides: dict | None = None


class TurnResponse(BaseModel):
    bot_utterance: str
    conversation_ended: bool
    turn_debug: dict | None = None


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="chirpy", version="0.1.0")
    # one in-flight turn per session; the store's turn check is the backstop
    session_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def lock_for(session_id: str) -> threading.Lock:
        with locks_guard:
            return session_locks.setdefault(session_id, threading.Lock())

    @app.post("/v1/turn", response_model=TurnResponse, response_model_exclude_none=True)
    def turn(request: TurnRequest, debug: bool = Query(default=False)):
        with lock_for(request.session_id):
            try:
                bot, ended, turn_debug = engine.handle_turn(
                    request.session_id, request.user_utterance, request.config_overrides
                )
            except StaleWriteError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
        return TurnResponse(
            bot_utterance=bot,
            conversation_ended=ended,
            turn_debug=turn_debug.to_dict() if debug else None,
        )

    @app.get("/v1/session/{session_id}/log")
    def session_log(session_id: str):
        if engine.log is None:
            raise HTTPException(status_code=404, detail="conversation logging is disabled")
        return {"session_id": session_id, "turns": engine.log.read_session(session_id)}

    @app.get("/v1/health")
    def health():
        return {
            "status": "ok",
            "entities": len(engine.index),
            "generators": [rg.name for rg in engine.registry],
        }

    return app
