"""Session-oriented HTTP API over the stepping engine.

Sessions are in-memory with TTL eviction.  Every payload carries display
strings produced by the same printers the CLI uses, so clients can render
without re-implementing any semantics.
"""
from __future__ import annotations

import hashlib
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .equiv import struct_normalize
from .irlts import (ReplConfig, ReversibleProcess, RTransition, Trace,
                    concurrent_r, enumerate_all, is_initial, origin,
                    parse_trace, print_state, serialize_trace)
from .syntax import SyntaxErrorCCS, parse_process, print_process
from .memory import print_memory

SESSION_TTL = 3600.0


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


@dataclass
class Session:
    id: str
    current: ReversibleProcess
    history: list[RTransition] = field(default_factory=list)
    repl: ReplConfig | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    touched: float = field(default_factory=time.monotonic)

    @property
    def initial(self) -> ReversibleProcess:
        return self.history[0].source if self.history else self.current

    def trace(self) -> Trace:
        return Trace(self.initial, tuple(self.history))


def state_fingerprint(r: ReversibleProcess) -> str:
    return hashlib.sha256(print_state(r).encode()).hexdigest()[:16]


def state_summary(r: ReversibleProcess) -> dict:
    return {
        "seed": str(r.seed),
        "memory": print_memory(r.mem),
        "process": print_process(r.proc),
        "display": print_state(r),
        "initial": is_initial(r),
        "fingerprint": state_fingerprint(r),
    }


def move_summary(index: int, t: RTransition) -> dict:
    return {
        "index": index,
        "direction": t.direction,
        "ident": str(t.ident),
        "label": str(t.label),
        "target": state_summary(t.target),
    }


class CreateSession(BaseModel):
    source: str | None = None
    trace: str | None = None
    replication_policy: str | None = None
    marks: bool = True
    struct_norm: bool = False


def create_app() -> FastAPI:
    app = FastAPI(title="revccs explorer API")
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    def purge():
        now = time.monotonic()
        with store_lock:
            for sid in [s for s, sess in sessions.items()
                        if now - sess.touched > SESSION_TTL]:
                del sessions[sid]

    def get_session(sid: str) -> Session:
        purge()
        sess = sessions.get(sid)
        if sess is None:
            raise ApiError(404, "unknown-session", f"no session {sid}")
        sess.touched = time.monotonic()
        return sess

    @app.exception_handler(ApiError)
    async def on_api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSession):
        repl = None
        if body.replication_policy:
            try:
                repl = ReplConfig(body.replication_policy, body.marks)
            except ValueError as e:
                raise ApiError(422, "bad-flags", str(e))
        if (body.source is None) == (body.trace is None):
            raise ApiError(422, "bad-request",
                           "provide exactly one of source or trace")
        history: list[RTransition] = []
        if body.source is not None:
            try:
                proc = parse_process(body.source)
            except SyntaxErrorCCS as e:
                raise ApiError(422, "parse-error", str(e))
            if body.struct_norm:
                proc = struct_normalize(proc)
            from .irlts import initial_state
            current = initial_state(proc)
        else:
            try:
                tr = parse_trace(body.trace)
            except ValueError as e:
                raise ApiError(422, "parse-error", str(e))
            history = list(tr.steps)
            current = tr.target
        sid = uuid.uuid4().hex[:12]
        with store_lock:
            sessions[sid] = Session(sid, current, history, repl)
        return {"id": sid, "state": state_summary(current)}

    @app.get("/sessions/{sid}")
    def get_state(sid: str):
        sess = get_session(sid)
        return {"id": sid, "state": state_summary(sess.current),
                "history_length": len(sess.history)}

    @app.get("/sessions/{sid}/moves")
    def list_moves(sid: str):
        sess = get_session(sid)
        with sess.lock:
            moves = enumerate_all(sess.current, sess.repl)
            matrix = [[None if i == j else concurrent_r(t, u)
                       for j, u in enumerate(moves)]
                      for i, t in enumerate(moves)]
            return {
                "fingerprint": state_fingerprint(sess.current),
                "moves": [move_summary(i, t) for i, t in enumerate(moves)],
                "concurrency": matrix,
            }

    @app.post("/sessions/{sid}/moves/{index}")
    def apply_move(sid: str, index: int, fingerprint: str | None = None):
        sess = get_session(sid)
        with sess.lock:
            if fingerprint is not None \
                    and fingerprint != state_fingerprint(sess.current):
                raise ApiError(409, "stale-move",
                               "the state changed since moves were listed")
            moves = enumerate_all(sess.current, sess.repl)
            if not 0 <= index < len(moves):
                raise ApiError(409, "bad-move-index",
                               f"index {index} not in 0..{len(moves) - 1}")
            t = moves[index]
            sess.history.append(t)
            sess.current = t.target
            return {"id": sid, "applied": move_summary(index, t),
                    "state": state_summary(sess.current)}

    @app.get("/sessions/{sid}/origin")
    def get_origin(sid: str):
        sess = get_session(sid)
        return {"id": sid, "origin": state_summary(origin(sess.current,
                                                          sess.repl))}

    @app.get("/sessions/{sid}/trace")
    def get_trace(sid: str):
        sess = get_session(sid)
        return PlainTextResponse(serialize_trace(sess.trace()))

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        get_session(sid)
        with store_lock:
            del sessions[sid]

    return app


def serve(port: int = 8000, ui_dir: str | None = None, host: str = "127.0.0.1"):
    import uvicorn
    app = create_app()
    if ui_dir:
        app.mount("/", StaticFiles(directory=Path(ui_dir), html=True),
                  name="ui")
    uvicorn.run(app, host=host, port=port)
