"""Scripted learners driving the full tutoring loop over the wire protocol.

The simulator speaks the same JSON message schema as a remote client, through
an in-process loopback (every message is serialized and reparsed), so it
exercises the real protocol path rather than internal APIs.

Policies:

    perfect      always plays the canonical macro for the generated task
    noisy        plays the macro but errs per quarter turn with probability
                 1 - p; after a wander budget it deterministically backtracks
                 and finishes via the macro so attempts always close
    randomwalk   plays random quarter turns
    hintseeker   requests a hint at a fixed level, then plays like perfect
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from . import cube, task_model
from .session import Session, compute_metrics, skill_rows_payload
from .task_model import TargetPiece
from .tracing import TracingParams

_TS_STEP = 1000
_NOISE_BUDGET = 8
_RANDOM_WALK_MOVES = 6

POLICY_NAMES = ("perfect", "noisy", "randomwalk", "hintseeker")


@dataclass(frozen=True)
class LearnerPolicy:
    """A scripted learner: `kind` plus its parameters, deterministic in seed."""

    kind: str
    p: float = 1.0
    hint_level: int = 2

    def __post_init__(self):
        if self.kind not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")


@dataclass
class SimResult:
    policy: LearnerPolicy
    seed: int
    tasks_served: int
    closed_attempts: int
    mastered: int
    skill_rows: list
    metrics: object
    log_path: str | None


class _Loopback:
    """Client side of the in-process protocol loop."""

    def __init__(self, session: Session):
        self.session = session
        self.seq = 0
        self.clock = 0

    def send(self, type_: str, payload: dict) -> list[dict]:
        self.seq += 1
        wire = json.dumps({"seq": self.seq, "type": type_, "payload": payload})
        responses = self.session.handle_message(json.loads(wire))
        return [json.loads(json.dumps(r)) for r in responses]

    def tick(self) -> int:
        self.clock += _TS_STEP
        return self.clock


def run_sim(policy: LearnerPolicy, seed: int, max_attempts: int = 40,
            params: TracingParams | None = None,
            log_path: str | None = None, session_id: str | None = None) -> SimResult:
    """Run one scripted session until mastery (task status done), the attempt
    cap, or the task-cycle cap; returns the final skillometer and metrics."""
    params = params or TracingParams()
    rng = random.Random(seed)
    session_id = session_id or f"{policy.kind}-{seed}"
    session = Session(session_id=session_id, params=params,
                      engine_seed=seed, log_path=log_path)
    io = _Loopback(session)
    io.send("hello", {"session_id": session_id,
                      "params": params.to_dict(), "seed": seed, "ts": io.clock})
    mode = "exploration"
    closed = 0
    tasks_served = 0
    last_rows = skill_rows_payload(session.tracer.records)

    def track(responses):
        nonlocal mode, closed, last_rows
        for r in responses:
            if r["type"] == "mode_changed":
                mode = r["payload"]["mode"]
            elif r["type"] == "skillometer":
                closed += 1
                last_rows = r["payload"]["rows"]

    while closed < max_attempts and tasks_served < max_attempts:
        if mode != "practice":
            responses = io.send("set_mode", {"mode": "practice", "ts": io.clock})
        else:
            responses = io.send("request_task", {"ts": io.clock})
        track(responses)
        task_msg = next((r for r in responses if r["type"] == "task"), None)
        if task_msg is None or task_msg["payload"].get("status") == "done":
            break
        tasks_served += 1
        track(_play_task(policy, rng, io, task_msg["payload"]))

    metrics = compute_metrics(session.events)
    session.close()
    return SimResult(
        policy=policy,
        seed=seed,
        tasks_served=tasks_served,
        closed_attempts=closed,
        mastered=sum(1 for row in last_rows if row["mastered"]),
        skill_rows=last_rows,
        metrics=metrics,
        log_path=log_path,
    )


def _play_task(policy: LearnerPolicy, rng: random.Random, io: _Loopback,
               task: dict) -> list[dict]:
    state = cube.parse(task["facelet"])
    component = task_model.KC_BY_ID[task_model.KcId(task["kc"])]
    piece_info = task["piece"]
    piece = TargetPiece(
        piece_info["kind"],
        frozenset(cube.Color[c.upper()] for c in piece_info["colors"]),
        piece_info["slot"],
    )
    responses: list[dict] = []

    def observe(new_state):
        responses.extend(io.send("observe", {
            "facelet": cube.serialize(new_state), "ts": io.tick()}))

    if policy.kind == "hintseeker":
        responses.extend(io.send("request_hint", {"level": policy.hint_level,
                                                  "ts": io.clock}))
    if policy.kind == "randomwalk":
        for _ in range(_RANDOM_WALK_MOVES):
            state = state.apply(rng.choice(cube.QUARTER_TURNS))
            observe(state)
        return responses

    macro = task_model.canonical_macro(component, piece, state)
    if policy.kind in ("perfect", "hintseeker"):
        for move in macro:
            state = state.apply(move)
            observe(state)
        return responses

    # noisy: planned moves with per-quarter-turn errors, then a deterministic
    # backtrack-and-finish after the wander budget runs out
    plan = list(macro)
    played: list = []
    noise_left = _NOISE_BUDGET
    base_macro = macro
    while plan:
        coin = rng.random()
        if noise_left > 0 and coin >= policy.p:
            deviation = rng.choice(cube.QUARTER_TURNS)
            state = state.apply(deviation)
            played.append(deviation)
            noise_left -= 1
            plan = [m.inverse() for m in reversed(played)] + list(base_macro)
            observe(state)
            continue
        move = plan.pop(0)
        state = state.apply(move)
        played.append(move)
        observe(state)
    return responses
