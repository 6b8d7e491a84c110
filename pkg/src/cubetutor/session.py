"""Session lifecycle, wire protocol, append-only event log, and analytics.

Transport-agnostic: `Session.handle_message` maps one client message to a
list of server messages, logging every effect as a SessionEvent.  Messages
are newline-delimited JSON envelopes {"seq", "type", "payload"} on both
directions; the facelet strings use the 54-character serialization.  The
full schema is documented in docs/protocol.md.

The event log is one JSON object per line with fields (seq, ts, kind,
payload).  Every session is deterministic given its message transcript and
logged seeds, so `replay` re-derives all events from the logged inputs and
verifies they reproduce the log byte-for-byte.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from . import cube, hints, task_model, tracing
from .cube import CubeState
from .errors import (
    CorruptLog, CubeTutorError, EmptyLog, NoActiveSkill, PatternMismatch,
    SchemaError,
)
from .solver import Stage, stage_goal_met
from .task_model import TargetPiece
from .taskgen import GeneratedTask, generate_task, pick_next_kc
from .tracing import StateObservation, Tracer, TracingParams, skillometer

PROTOCOL_VERSION = 1

_MODES = ("exploration", "practice")

CLIENT_TYPES = ("hello", "observe", "request_hint", "request_task",
                "set_mode", "scramble", "advance_stage")

EVENT_KINDS = (
    "StateObserved", "MoveInferred", "AttemptOpened", "AttemptClosed",
    "HintRequested", "HintServed", "TaskGenerated", "TaskAccepted",
    "SkillUpdated", "ModeChanged", "StageAdvanced", "Scrambled",
    "FeedbackEmitted", "Discontinuity",
)


def dump_event(event: dict) -> str:
    return json.dumps(event, sort_keys=True, separators=(",", ":"))


def _piece_payload(piece: TargetPiece) -> dict:
    return {
        "kind": piece.kind,
        "colors": sorted(c.name.lower() for c in piece.colors),
        "slot": piece.slot,
    }


def skill_rows_payload(records) -> list[dict]:
    return [
        {"kc": row.kc_id.value, "score": row.score, "mastered": row.mastered,
         "attempts": row.attempts_seen}
        for row in skillometer(records)
    ]


class Session:
    """One learner session: a serialized mailbox over the wire protocol."""

    def __init__(self, session_id: str = "session", params: TracingParams | None = None,
                 engine_seed: int = 0, log_path: str | Path | None = None):
        self.session_id = session_id
        self.params = params or TracingParams()
        self.engine_seed = engine_seed
        self._task_counter = 0
        self._scramble_counter = 0
        self.state: CubeState = cube.SOLVED
        self.mode = "exploration"
        self.stage = Stage.WHITE_FLOWER
        self.tracer = Tracer(self.params, self.stage)
        self.open_task: GeneratedTask | None = None
        self.started = False
        self.clock = 0
        self.events: list[dict] = []
        self._event_seq = 0
        self._server_seq = 0
        self._log_file = open(log_path, "a", encoding="utf-8") if log_path else None

    def close(self) -> None:
        if self._log_file:
            self._log_file.close()
            self._log_file = None

    # -- event log ----------------------------------------------------------------

    def _log(self, kind: str, payload: dict, ts: int | None = None) -> dict:
        self._event_seq += 1
        event = {"seq": self._event_seq, "ts": self.clock if ts is None else ts,
                 "kind": kind, "payload": payload}
        self.events.append(event)
        if self._log_file:
            self._log_file.write(dump_event(event) + "\n")
            self._log_file.flush()
        return event

    def _msg(self, type_: str, payload: dict) -> dict:
        self._server_seq += 1
        return {"seq": self._server_seq, "type": type_, "payload": payload}

    # -- message handling -----------------------------------------------------------

    def handle_message(self, message: dict) -> list[dict]:
        try:
            type_, payload = self._validate_envelope(message)
        except SchemaError as err:
            return [self._msg("error", {"code": "schema", "message": str(err)})]
        try:
            handler = getattr(self, f"_on_{type_}")
            return handler(payload)
        except SchemaError as err:
            return [self._msg("error", {"code": "schema", "message": str(err)})]
        except CubeTutorError as err:
            return [self._msg("error", {"code": type(err).__name__.lower(),
                                        "message": str(err)})]

    def _validate_envelope(self, message) -> tuple[str, dict]:
        if not isinstance(message, dict):
            raise SchemaError("message must be a JSON object")
        type_ = message.get("type")
        if type_ not in CLIENT_TYPES:
            raise SchemaError(f"unknown message type {type_!r}")
        payload = message.get("payload", {})
        if not isinstance(payload, dict):
            raise SchemaError("payload must be an object")
        if not self.started and type_ != "hello":
            raise SchemaError("session not started; send hello first")
        return type_, payload

    def _ts(self, payload: dict) -> int:
        ts = payload.get("ts", self.clock)
        if not isinstance(ts, int):
            raise SchemaError("ts must be an integer (milliseconds)")
        self.clock = max(self.clock, ts)
        return ts

    def _derived_seed(self, kind: str, counter: int) -> int:
        # Server-drawn seeds are a pure function of (engine seed, counter) so
        # original runs and replays stay aligned no matter which requests
        # carried explicit seeds.
        return random.Random(f"{self.engine_seed}:{kind}:{counter}").getrandbits(32)

    # -- handlers -------------------------------------------------------------------

    def _on_hello(self, payload: dict) -> list[dict]:
        if self.started:
            raise SchemaError("session already started")
        if "params" in payload:
            self.params = TracingParams.from_dict(payload["params"])
            self.tracer.params = self.params
        if "session_id" in payload:
            self.session_id = str(payload["session_id"])
        if "seed" in payload:
            self.engine_seed = int(payload["seed"])
        self.started = True
        ts = self._ts(payload)
        self._log("ModeChanged", {
            "mode": self.mode, "stage": self.stage.name.lower(), "reason": "hello",
            "session_id": self.session_id, "params": self.params.to_dict(),
            "engine_seed": self.engine_seed, "version": PROTOCOL_VERSION,
        }, ts)
        self.tracer.reset_baseline(StateObservation(self.state, ts))
        return [self._msg("welcome", {
            "session_id": self.session_id,
            "facelet": cube.serialize(self.state),
            "mode": self.mode,
            "stage": self.stage.name.lower(),
            "params": self.params.to_dict(),
            "kc_catalog": task_model.catalog_records(),
        })]

    def _on_observe(self, payload: dict) -> list[dict]:
        facelet = payload.get("facelet")
        if "ts" not in payload:
            raise SchemaError("observe requires a client timestamp")
        if not isinstance(facelet, str):
            raise SchemaError("observe requires a facelet string")
        try:
            observed = cube.parse(facelet)
        except CubeTutorError as err:
            raise SchemaError(f"bad facelet: {err}") from None
        if not isinstance(payload["ts"], int):
            raise SchemaError("ts must be an integer (milliseconds)")
        if self.tracer.prev is not None and payload["ts"] <= self.tracer.prev.ts:
            raise SchemaError("observation timestamps must strictly increase")
        ts = self._ts(payload)
        if not cube.is_legal(observed):
            self._log("Discontinuity", {"reason": "illegal-state"}, ts)
            return [self._msg("error", {"code": "illegalstate",
                                        "message": "observation is not a reachable state"})]
        self._log("StateObserved", {"facelet": facelet, "ts": ts}, ts)
        trace_events = self.tracer.observe(StateObservation(observed, ts))
        self.state = observed
        out = [self._msg("rendered", {"facelet": facelet})]
        out.extend(self._emit_trace_events(trace_events, ts))
        out.extend(self._auto_transitions(ts))
        return out

    def _on_request_hint(self, payload: dict) -> list[dict]:
        level = payload.get("level")
        if level not in (1, 2, 3):
            raise SchemaError("hint level must be 1, 2 or 3")
        ts = self._ts(payload)
        payload_obj = None
        for component, piece in self._hint_pairs():
            try:
                payload_obj = hints.make_hint(self.state, component, piece, level)
                break
            except PatternMismatch:
                continue
        if payload_obj is None:
            raise NoActiveSkill("no knowledge component is active")
        self._log("HintRequested", {"level": level}, ts)
        self.tracer.register_hint(level, ts)
        hint_dict = payload_obj.to_dict()
        self._log("HintServed", hint_dict, ts)
        return [self._msg("hint", hint_dict)]

    def _hint_pairs(self):
        """Hint targets, most specific first: the active task's pair while its
        pattern still holds, then the piece's current classification (the
        next primitive step when a macro is half done), then any same-stage
        match."""
        pairs = []
        if self.open_task is not None:
            pairs.append((task_model.kc(self.open_task.kc_id), self.open_task.piece))
            normalized, _ = cube.normalize_orientation(self.state)
            for component, piece in task_model.match_kc(normalized):
                if piece.key == self.open_task.piece.key:
                    pairs.append((component, piece))
        pairs.extend((c, p) for c, p in task_model.match_kc(self.state)
                     if c.stage == self.stage)
        return pairs

    def _on_request_task(self, payload: dict) -> list[dict]:
        if self.mode != "practice":
            raise SchemaError("tasks are generated in practice mode")
        ts = self._ts(payload)
        return self._serve_task(payload.get("seed"), ts)

    def _serve_task(self, seed, ts: int, auto: bool = False) -> list[dict]:
        out = self._close_incomplete_task(ts)
        kc_id = pick_next_kc(self.tracer.records)
        if kc_id is None:
            self.open_task = None
            self._log("TaskGenerated", {"done": True, "auto": auto}, ts)
            out.append(self._msg("task", {"status": "done"}))
            return out
        self._task_counter += 1
        if seed is None:
            seed = self._derived_seed("task", self._task_counter)
        task = generate_task(kc_id, int(seed))
        facelet = cube.serialize(task.state)
        self._log("TaskGenerated", {
            "kc": kc_id.value, "seed": task.seed, "template_index": task.template_index,
            "facelet": facelet, "piece": _piece_payload(task.piece), "auto": auto,
        }, ts)
        out.extend(self._enter_stage(task_model.kc(kc_id).stage, "task-stage", ts))
        self.open_task = task
        self.state = task.state
        self.tracer.set_focus(kc_id, task.piece)
        self.tracer.reset_baseline(StateObservation(task.state, ts))
        self._log("TaskAccepted", {"kc": kc_id.value, "facelet": facelet}, ts)
        out.append(self._msg("task", {
            "status": "task", "kc": kc_id.value, "facelet": facelet,
            "piece": _piece_payload(task.piece), "template_index": task.template_index,
            "seed": task.seed,
        }))
        return out

    def _on_set_mode(self, payload: dict) -> list[dict]:
        mode = payload.get("mode")
        if mode not in _MODES:
            raise SchemaError(f"mode must be one of {_MODES}")
        ts = self._ts(payload)
        return self._change_mode(mode, "requested", ts)

    def _on_scramble(self, payload: dict) -> list[dict]:
        ts = self._ts(payload)
        out = self._close_incomplete_task(ts)
        self._scramble_counter += 1
        seed = payload.get("seed")
        if seed is None:
            seed = self._derived_seed("scramble", self._scramble_counter)
        n_moves = int(payload.get("n_moves", 25))
        state, _ = cube.scramble(int(seed), n_moves)
        facelet = cube.serialize(state)
        self._log("Scrambled", {"seed": int(seed), "n_moves": n_moves,
                                "facelet": facelet}, ts)
        self.state = state
        self.open_task = None
        self.tracer.set_focus(None)
        self.tracer.reset_baseline(StateObservation(state, ts))
        out.append(self._msg("rendered", {"facelet": facelet}))
        return out

    def _on_advance_stage(self, payload: dict) -> list[dict]:
        ts = self._ts(payload)
        if self.stage is Stage.FOUR_CORNERS:
            raise SchemaError("already at the final stage")
        out = self._enter_stage(Stage(self.stage + 1), "requested", ts)
        if self.mode == "practice":
            out.extend(self._change_mode("exploration", "stage-advance", ts))
        return out

    # -- shared transitions ------------------------------------------------------------

    def _close_incomplete_task(self, ts: int) -> list[dict]:
        """A task ending without its goal closes as a failed graded attempt,
        provided the learner had started moving the target."""
        if self.open_task is None:
            return []
        events = self.tracer.fail_focus(ts)
        self.open_task = None
        return self._emit_trace_events(events, ts)

    def _change_mode(self, mode: str, reason: str, ts: int) -> list[dict]:
        out = []
        entering_practice = mode == "practice" and self.mode == "exploration"
        if mode == "exploration" and self.mode == "practice":
            out.extend(self._close_incomplete_task(ts))
        self.mode = mode
        if mode == "exploration":
            self.open_task = None
            self.tracer.set_focus(None)
        self._log("ModeChanged", {"mode": mode, "stage": self.stage.name.lower(),
                                  "reason": reason}, ts)
        out.append(self._msg("mode_changed", {"mode": mode, "stage": self.stage.name.lower(),
                                              "reason": reason}))
        if entering_practice:
            out.extend(self._serve_task(None, ts, auto=True))
        return out

    def _enter_stage(self, stage: Stage, reason: str, ts: int) -> list[dict]:
        if stage == self.stage:
            return []
        self.stage = stage
        self.tracer.set_stage(stage)
        self._log("StageAdvanced", {"stage": stage.name.lower(), "reason": reason}, ts)
        return [self._msg("mode_changed", {"mode": self.mode,
                                           "stage": stage.name.lower(),
                                           "reason": reason})]

    def _emit_trace_events(self, trace_events, ts: int) -> list[dict]:
        out = []
        for ev in trace_events:
            if isinstance(ev, tracing.MoveInferred):
                self._log("MoveInferred", {"move": ev.move.notation,
                                           "synthesized": ev.synthesized}, ev.ts)
            elif isinstance(ev, tracing.Discontinuity):
                self._log("Discontinuity", {"reason": ev.reason}, ev.ts)
            elif isinstance(ev, tracing.BlockPlaced):
                event = self._log("FeedbackEmitted", {
                    "kind": "block-placed", "blocks": [_piece_payload(ev.piece)],
                }, ev.ts)
                out.append(self._msg("feedback", {
                    "kind": "block-placed", "blocks": event["payload"]["blocks"],
                }))
            elif isinstance(ev, tracing.AttemptOpened):
                a = ev.attempt
                self._log("AttemptOpened", {
                    "kc": a.kc_id.value, "piece": _piece_payload(a.piece),
                    "start_ts": a.start_ts, "pattern_ts": a.states[0].ts,
                }, ev.ts)
            elif isinstance(ev, tracing.AttemptClosed):
                a = ev.attempt
                self._log("AttemptClosed", {
                    "kc": a.kc_id.value, "piece": _piece_payload(a.piece),
                    "opened_seq": self._event_seq,
                    "start_ts": a.start_ts, "end_ts": a.end_ts,
                    "k": len(a.states), "ratio": a.ratio, "success": a.success,
                    "hint_level": a.hint_level, "graded": a.graded,
                    "reason": ev.reason,
                }, ev.ts)
                if self.open_task is not None and a.kc_id is self.open_task.kc_id and a.graded:
                    self.open_task = None
            elif isinstance(ev, tracing.SkillUpdated):
                r = ev.record
                self._log("SkillUpdated", {
                    "kc": r.kc_id.value, "score": r.score, "mastered": r.mastered,
                    "attempts_seen": r.attempts_seen,
                }, ev.ts)
                out.append(self._msg("skillometer",
                                     {"rows": skill_rows_payload(self.tracer.records)}))
        return out

    def _auto_transitions(self, ts: int) -> list[dict]:
        out = []
        if self.mode == "exploration" and stage_goal_met(self.state, self.stage):
            out.extend(self._change_mode("practice", "stage-complete", ts))
        elif self.mode == "practice":
            stage_ids = [c.id for c in task_model.CATALOG if c.stage == self.stage]
            if all(self.tracer.records[k].mastered for k in stage_ids):
                if self.stage is not Stage.FOUR_CORNERS:
                    out.extend(self._enter_stage(Stage(self.stage + 1), "mastered", ts))
                    out.extend(self._change_mode("exploration", "stage-advance", ts))
        return out


def positive_feedback_check(prev: CubeState, nxt: CubeState, stage: Stage) -> list[TargetPiece]:
    """Blocks newly satisfying the stage's per-block goal between two states."""
    tracer = Tracer(stage=stage)
    prev_n = cube.normalize_orientation(prev)[0]
    new_n = cube.normalize_orientation(nxt)[0]
    return [ev.piece for ev in tracer._feedback(prev_n, new_n, 0)]


# --- analytics --------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessMetrics:
    """Per-component exercise counts and the preparation-cost ratio."""

    kc_counts: dict
    exercise_ms: tuple
    preparation_ms: tuple
    preparation_cost: float | None
    distinct_kcs: int

    def to_dict(self) -> dict:
        return {
            "kc_counts": dict(self.kc_counts),
            "exercise_ms": list(self.exercise_ms),
            "preparation_ms": list(self.preparation_ms),
            "preparation_cost": self.preparation_cost,
            "distinct_kcs": self.distinct_kcs,
        }


def compute_metrics(events: list[dict]) -> ProcessMetrics:
    """Exercise opportunity analytics over one session's event log.

    Exercise time of an attempt is end - start; preparation time is the gap
    from the previous attempt's end (or session start) to the attempt's
    start; preparation cost is total preparation over total exercise, None
    (undefined) when no exercise time was accrued.
    """
    if not events:
        raise EmptyLog("no events in log")
    kc_counts = {component.id.value: 0 for component in task_model.CATALOG}
    exercise, preparation = [], []
    cursor = events[0]["ts"]
    for event in events:
        if event["kind"] != "AttemptClosed" or not event["payload"].get("graded"):
            continue
        payload = event["payload"]
        kc_counts[payload["kc"]] += 1
        exercise.append(payload["end_ts"] - payload["start_ts"])
        preparation.append(payload["start_ts"] - cursor)
        cursor = payload["end_ts"]
    total_ex = sum(exercise)
    cost = (sum(preparation) / total_ex) if total_ex > 0 else None
    return ProcessMetrics(
        kc_counts=kc_counts,
        exercise_ms=tuple(exercise),
        preparation_ms=tuple(preparation),
        preparation_cost=cost,
        distinct_kcs=sum(1 for v in kc_counts.values() if v),
    )


# --- replay -----------------------------------------------------------------------

@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    events_checked: int
    first_divergence: int | None
    session: Session


def load_log(path: str | Path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    events = []
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            event = json.loads(line)
        except json.JSONDecodeError:
            raise CorruptLog(i, "unparseable line") from None
        events.append(event)
    return events


def validate_log(events: list[dict]) -> None:
    if not events:
        raise EmptyLog("no events in log")
    for i, event in enumerate(events, start=1):
        if not isinstance(event, dict) or {"seq", "ts", "kind", "payload"} - set(event):
            raise CorruptLog(i, "missing fields")
        if event["seq"] != i:
            raise CorruptLog(event.get("seq", i), "sequence gap or reorder")
        if event["kind"] not in EVENT_KINDS:
            raise CorruptLog(i, f"unknown kind {event['kind']!r}")


def replay(events: list[dict]) -> ReplayReport:
    """Re-derive all events from the logged inputs; byte-identical on success.

    The first event must be the session-start ModeChanged carrying the params
    and engine seed.  Raises CorruptLog on malformed logs.
    """
    validate_log(events)
    head = events[0]
    if head["kind"] != "ModeChanged" or head["payload"].get("reason") != "hello":
        raise CorruptLog(1, "log does not start with the hello event")
    boot = head["payload"]
    session = Session(session_id=boot.get("session_id", "replay"),
                      params=TracingParams.from_dict(boot["params"]),
                      engine_seed=boot.get("engine_seed", 0))
    session.handle_message({"seq": 1, "type": "hello", "payload": {
        "session_id": boot.get("session_id"), "params": boot["params"],
        "seed": boot.get("engine_seed", 0), "ts": head["ts"],
    }})
    for event in events[1:]:
        kind, payload, ts = event["kind"], event["payload"], event["ts"]
        if kind == "StateObserved":
            session.handle_message({"type": "observe", "payload": {
                "facelet": payload["facelet"], "ts": payload["ts"]}})
        elif kind == "HintRequested":
            session.handle_message({"type": "request_hint", "payload": {
                "level": payload["level"], "ts": ts}})
        elif kind == "TaskGenerated":
            if payload.get("auto"):
                continue  # reproduced by replaying the mode change
            body = {"ts": ts}
            if not payload.get("done"):
                body["seed"] = payload["seed"]
            session.handle_message({"type": "request_task", "payload": body})
        elif kind == "Scrambled":
            session.handle_message({"type": "scramble", "payload": {
                "seed": payload["seed"], "n_moves": payload["n_moves"], "ts": ts}})
        elif kind == "ModeChanged" and payload.get("reason") == "requested":
            session.handle_message({"type": "set_mode", "payload": {
                "mode": payload["mode"], "ts": ts}})
        elif kind == "StageAdvanced" and payload.get("reason") == "requested":
            session.handle_message({"type": "advance_stage", "payload": {"ts": ts}})
    reproduced = session.events
    checked = min(len(reproduced), len(events))
    first_divergence = None
    for i in range(checked):
        if dump_event(reproduced[i]) != dump_event(events[i]):
            first_divergence = events[i]["seq"]
            break
    if first_divergence is None and len(reproduced) != len(events):
        first_divergence = min(len(reproduced), len(events)) + 1
    return ReplayReport(first_divergence is None, len(events), first_divergence, session)
