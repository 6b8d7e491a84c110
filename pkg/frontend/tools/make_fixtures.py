"""Regenerate the frontend test fixtures from the engine.

Run from the repository root:  python frontend/tools/make_fixtures.py
Writes frontend/fixtures/moves.json and frontend/fixtures/transcript.json.
"""

import json
from pathlib import Path

from cubetutor import cube
from cubetutor.cube import SOLVED, parse_moves, serialize
from cubetutor.session import Session

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SCRIPT_MOVES = "U R F' D L2"


def moves_fixture() -> dict:
    per_move = {m.notation: serialize(SOLVED.apply(m)) for m in cube.ALL_MOVES}
    replay = []
    state = SOLVED
    for move in parse_moves("R U2 F' L D R' B2 U L' F D2 R"):
        state = state.apply(move)
        replay.append({"move": move.notation, "facelet": serialize(state)})
    return {
        "solved": serialize(SOLVED),
        "after_move": per_move,
        "replay": replay,
    }


def transcript_fixture() -> dict:
    """The scripted golden session: connect, five moves, hint level 2,
    accept a task (enter practice), scramble.  Timestamps step by 1000."""
    session = Session(session_id="golden", engine_seed=7)
    client_messages = []
    reply_groups = []

    state = SOLVED
    ts = 0

    def send(type_, payload):
        nonlocal ts
        message = {"seq": len(client_messages) + 1, "type": type_,
                   "payload": {**payload, "ts": ts}}
        client_messages.append(message)
        reply_groups.append(session.handle_message(json.loads(json.dumps(message))))
        ts += 1000

    send("hello", {"session_id": "golden"})
    for move in parse_moves(SCRIPT_MOVES):
        state = state.apply(move)
        send("observe", {"facelet": serialize(state)})
    send("request_hint", {"level": 2})
    send("set_mode", {"mode": "practice"})  # the task arrives with the reply
    send("scramble", {"seed": 13})
    return {
        "script_moves": SCRIPT_MOVES,
        "client": client_messages,
        "replies": reply_groups,
    }


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "moves.json").write_text(
        json.dumps(moves_fixture(), indent=1, sort_keys=True), encoding="utf-8")
    (FIXTURES / "transcript.json").write_text(
        json.dumps(transcript_fixture(), indent=1, sort_keys=True), encoding="utf-8")
    print(f"wrote {FIXTURES / 'moves.json'}")
    print(f"wrote {FIXTURES / 'transcript.json'}")


if __name__ == "__main__":
    main()
