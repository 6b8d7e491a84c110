"""Transports for the session protocol: stdio and WebSocket.

Both speak newline-delimited JSON envelopes with the identical schema; one
session per stdio process, one session per WebSocket connection.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .session import Session
from .tracing import TracingParams


def _respond(session: Session, raw: str) -> list[str]:
    try:
        message = json.loads(raw)
    except json.JSONDecodeError:
        return [json.dumps({"seq": 0, "type": "error",
                            "payload": {"code": "schema", "message": "not valid JSON"}})]
    return [json.dumps(reply) for reply in session.handle_message(message)]


def serve_stdio(params: TracingParams | None = None, engine_seed: int = 0,
                log_path: str | None = None,
                stdin=None, stdout=None) -> None:
    """Serve one session over stdin/stdout until EOF."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = Session(session_id="stdio", params=params, engine_seed=engine_seed,
                      log_path=log_path)
    try:
        for line in stdin:
            line = line.strip()
            if not line:
                continue
            for reply in _respond(session, line):
                stdout.write(reply + "\n")
            stdout.flush()
    finally:
        session.close()


def serve_websocket(host: str, port: int, params: TracingParams | None = None,
                    engine_seed: int = 0, log_dir: str | None = None,
                    ready_file=None) -> None:
    """Serve sessions over WebSocket, one per connection, until interrupted."""
    from websockets.sync.server import serve

    counter = {"n": 0}

    def handler(connection):
        counter["n"] += 1
        session_id = f"ws-{counter['n']}"
        log_path = None
        if log_dir:
            log_path = str(Path(log_dir) / f"{session_id}.jsonl")
        session = Session(session_id=session_id, params=params,
                          engine_seed=engine_seed + counter["n"], log_path=log_path)
        try:
            for raw in connection:
                for reply in _respond(session, raw):
                    connection.send(reply)
        finally:
            session.close()

    with serve(handler, host, port) as server:
        out = ready_file or sys.stdout
        out.write(f"listening on ws://{host}:{port}\n")
        out.flush()
        server.serve_forever()
