import json

import pytest

from cubetutor import cube, task_model
from cubetutor.cube import SOLVED, parse_move, serialize
from cubetutor.errors import CorruptLog, EmptyLog
from cubetutor.session import (
    ProcessMetrics, Session, compute_metrics, dump_event, load_log,
    positive_feedback_check, replay, validate_log,
)
from cubetutor.sim import LearnerPolicy, run_sim
from cubetutor.solver import Stage
from cubetutor.task_model import KcId
from cubetutor.tracing import TracingParams


def started_session(**kwargs):
    session = Session(session_id="t", **kwargs)
    replies = session.handle_message({"type": "hello", "payload": {"ts": 0}})
    assert replies[0]["type"] == "welcome"
    return session


def send(session, type_, **payload):
    return session.handle_message({"type": type_, "payload": payload})


class TestProtocolBasics:
    def test_welcome_carries_catalog(self):
        session = started_session()
        welcome_event = session.events[0]
        assert welcome_event["kind"] == "ModeChanged"
        assert welcome_event["payload"]["reason"] == "hello"

    def test_observe_infers_move(self):
        session = started_session()
        state = SOLVED.apply(parse_move("U"))
        replies = send(session, "observe", facelet=serialize(state), ts=1000)
        assert replies[0]["type"] == "rendered"
        kinds = [e["kind"] for e in session.events]
        assert "MoveInferred" in kinds and "StateObserved" in kinds

    def test_malformed_facelet_rejected_without_event(self):
        session = started_session()
        before = len(session.events)
        replies = send(session, "observe", facelet="XYZ", ts=1000)
        assert replies[0]["type"] == "error"
        assert len(session.events) == before

    def test_unknown_type_rejected(self):
        session = started_session()
        replies = session.handle_message({"type": "frobnicate", "payload": {}})
        assert replies[0]["type"] == "error"

    def test_unknown_fields_ignored(self):
        session = started_session()
        replies = send(session, "scramble", seed=5, ts=1, extra_field="ignored")
        assert replies[-1]["type"] == "rendered"

    def test_not_started_rejected(self):
        session = Session(session_id="x")
        replies = send(session, "scramble", seed=1)
        assert replies[0]["type"] == "error"

    def test_illegal_observation_logs_discontinuity(self):
        session = started_session()
        flipped = bytearray(SOLVED.stickers)
        a, b = cube.EDGE_SLOTS[0]
        flipped[a], flipped[b] = flipped[b], flipped[a]
        bad = serialize(cube.CubeState(bytes(flipped)))
        replies = send(session, "observe", facelet=bad, ts=1000)
        assert replies[0]["type"] == "error"
        assert session.events[-1]["kind"] == "Discontinuity"


class TestModeMachine:
    def test_enter_practice_serves_task(self):
        session = started_session()
        replies = send(session, "set_mode", mode="practice", ts=1)
        types = [r["type"] for r in replies]
        assert types[0] == "mode_changed"
        assert "task" in types
        assert session.open_task is not None

    def test_practice_to_exploration_on_advance(self):
        session = started_session()
        send(session, "set_mode", mode="practice", ts=1)
        replies = send(session, "advance_stage", ts=2)
        payloads = [r["payload"] for r in replies if r["type"] == "mode_changed"]
        assert any(p["stage"] == "white_cross" for p in payloads)
        assert session.mode == "exploration"

    def test_exploration_auto_practice_on_stage_completion(self):
        session = started_session()
        # build the daisy by feeding the four flips as observations
        state = cube.NORMALIZED_SOLVED
        ts = 0
        for notation in ("F2", "R2", "B2", "L2"):
            state = state.apply(parse_move(notation))
            ts += 1000
            replies = send(session, "observe", facelet=serialize(state), ts=ts)
        modes = [r["payload"] for r in replies if r["type"] == "mode_changed"]
        assert any(p["reason"] == "stage-complete" and p["mode"] == "practice"
                   for p in modes)

    def test_advance_past_final_stage_rejected(self):
        session = started_session()
        send(session, "advance_stage", ts=1)
        send(session, "advance_stage", ts=2)
        replies = send(session, "advance_stage", ts=3)
        assert replies[0]["type"] == "error"


class TestTaskAndHints:
    def test_task_flow_with_hint(self):
        session = started_session()
        replies = send(session, "set_mode", mode="practice", ts=1)
        task = next(r["payload"] for r in replies if r["type"] == "task")
        assert task["status"] == "task" and task["kc"] == "side"
        hint = send(session, "request_hint", level=2, ts=2)[0]
        assert hint["type"] == "hint" and hint["payload"]["level"] == 2
        assert hint["payload"]["highlight"] and hint["payload"]["grayout"]
        # play the macro through the protocol; the attempt carries the hint
        state = cube.parse(task["facelet"])
        piece = task_model.TargetPiece(
            "edge",
            frozenset(cube.Color[c.upper()] for c in task["piece"]["colors"]),
            task["piece"]["slot"])
        ts = 1000
        for move in task_model.canonical_macro(KcId.SIDE, piece, state):
            state = state.apply(move)
            ts += 1000
            send(session, "observe", facelet=serialize(state), ts=ts)
        closed = [e for e in session.events if e["kind"] == "AttemptClosed"]
        assert closed and closed[-1]["payload"]["hint_level"] == 2
        assert closed[-1]["payload"]["success"]

    def test_hint_without_active_skill(self):
        session = started_session()
        replies = send(session, "request_hint", level=1, ts=1)
        assert replies[0]["type"] == "error"
        assert replies[0]["payload"]["code"] == "noactiveskill"

    def test_hint_mid_attempt_falls_back_to_current_pattern(self):
        session = started_session()
        replies = send(session, "set_mode", mode="practice", ts=1)
        task = next(r["payload"] for r in replies if r["type"] == "task")
        state = cube.parse(task["facelet"])
        piece = task_model.TargetPiece(
            task["piece"]["kind"],
            frozenset(cube.Color[c.upper()] for c in task["piece"]["colors"]),
            task["piece"]["slot"])
        macro = task_model.canonical_macro(KcId(task["kc"]), piece, state)
        # move the target the wrong way: the attempt is open and the task's
        # original pattern no longer holds
        state = state.apply(macro[0].inverse())
        send(session, "observe", facelet=serialize(state), ts=1000)
        assert not task_model.pattern_holds(
            task_model.kc(KcId(task["kc"])), piece, state)
        replies = send(session, "request_hint", level=3, ts=1500)
        assert replies[0]["type"] == "hint"
        hinted = replies[0]["payload"]
        assert sorted(hinted["piece"]["colors"]) == sorted(task["piece"]["colors"])
        steps = [s["move"] for s in hinted["steps"]]
        end = state.apply_all(cube.parse_moves(" ".join(steps)))
        normalized, _ = cube.normalize_orientation(end)
        located = task_model.find_piece(normalized, piece.kind, piece.colors)
        assert task_model.white_pos_of_edge(normalized, located.slot) in (1, 3, 5, 7)

    def test_request_task_outside_practice_rejected(self):
        session = started_session()
        assert send(session, "request_task", ts=1)[0]["type"] == "error"

    def test_done_when_all_mastered(self):
        session = started_session()
        self._master_all(session)
        replies = send(session, "request_task", ts=session.clock + 1)
        assert any(r["type"] == "task" and r["payload"].get("status") == "done"
                   for r in replies)

    @staticmethod
    def _master_all(session):
        result = None
        mode = "exploration"
        clock = [1000]

        def tick():
            clock[0] += 1000
            return clock[0]

        for _ in range(40):
            if session.mode != "practice":
                replies = send(session, "set_mode", mode="practice", ts=tick())
            else:
                replies = send(session, "request_task", ts=tick())
            task = next((r["payload"] for r in replies if r["type"] == "task"), None)
            if task is None or task.get("status") == "done":
                return
            state = cube.parse(task["facelet"])
            piece = task_model.TargetPiece(
                "edge" if task["piece"]["kind"] == "edge" else "corner",
                frozenset(cube.Color[c.upper()] for c in task["piece"]["colors"]),
                task["piece"]["slot"])
            component = task_model.KC_BY_ID[KcId(task["kc"])]
            for move in task_model.canonical_macro(component, piece, state):
                state = state.apply(move)
                send(session, "observe", facelet=serialize(state), ts=tick())


class TestFeedback:
    def test_petal_insertion_emits_feedback(self):
        session = started_session()
        send(session, "set_mode", mode="practice", ts=1)
        task = session.open_task
        state = task.state
        macro = task_model.canonical_macro(task_model.kc(task.kc_id), task.piece, state)
        ts = 1000
        feedback = []
        for move in macro:
            state = state.apply(move)
            ts += 1000
            feedback += [r for r in send(session, "observe",
                                         facelet=serialize(state), ts=ts)
                         if r["type"] == "feedback"]
        assert len(feedback) == 1
        assert feedback[0]["payload"]["kind"] == "block-placed"

    def test_positive_feedback_check_op(self):
        before = cube.NORMALIZED_SOLVED.apply_all(
            cube.parse_moves("F2"))  # one petal up
        after = before.apply_all(cube.parse_moves("R2"))  # second petal
        placed = positive_feedback_check(before, after, Stage.WHITE_FLOWER)
        assert len(placed) == 1
        neutral = positive_feedback_check(before, before.apply(parse_move("D")),
                                          Stage.WHITE_FLOWER)
        assert neutral == []
        removed = positive_feedback_check(after, before, Stage.WHITE_FLOWER)
        assert removed == []  # no negative feedback


def hand_built_log():
    """Session start at 0; two 10-second attempts with 5-second gaps."""

    def closed(seq, kc, start, end):
        return {"seq": seq, "ts": end, "kind": "AttemptClosed", "payload": {
            "kc": kc, "start_ts": start, "end_ts": end, "graded": True,
            "ratio": 1.0, "success": True, "hint_level": None, "k": 2,
            "opened_seq": seq - 1, "piece": {}, "reason": "goal"}}

    def opened(seq, kc, start):
        return {"seq": seq, "ts": start, "kind": "AttemptOpened",
                "payload": {"kc": kc, "start_ts": start, "pattern_ts": 0, "piece": {}}}

    return [
        {"seq": 1, "ts": 0, "kind": "ModeChanged", "payload": {
            "mode": "exploration", "stage": "white_flower", "reason": "hello",
            "session_id": "fixture", "params": TracingParams().to_dict(),
            "engine_seed": 0, "version": 1}},
        opened(2, "side", 5_000),
        closed(3, "side", 5_000, 15_000),
        opened(4, "side", 20_000),
        closed(5, "side", 20_000, 30_000),
    ]


class TestMetrics:
    def test_fixture_preparation_cost_half(self):
        metrics = compute_metrics(hand_built_log())
        assert metrics.exercise_ms == (10_000, 10_000)
        assert metrics.preparation_ms == (5_000, 5_000)
        assert metrics.preparation_cost == pytest.approx(0.5)
        assert metrics.kc_counts["side"] == 2
        assert metrics.distinct_kcs == 1

    def test_no_attempts_cost_undefined(self):
        metrics = compute_metrics(hand_built_log()[:1])
        assert metrics.preparation_cost is None
        assert metrics.distinct_kcs == 0
        assert all(v == 0 for v in metrics.kc_counts.values())

    def test_empty_log_rejected(self):
        with pytest.raises(EmptyLog):
            compute_metrics([])

    def test_distinct_kcs_counted(self, tmp_path):
        log = tmp_path / "s.jsonl"
        run_sim(LearnerPolicy("perfect"), seed=2, max_attempts=9, log_path=str(log))
        metrics = compute_metrics(load_log(log))
        assert metrics.distinct_kcs == 3  # nine attempts master three components


class TestReplay:
    def test_sim_log_replays_byte_identically(self, tmp_path):
        log = tmp_path / "sim.jsonl"
        run_sim(LearnerPolicy("hintseeker", hint_level=2), seed=4,
                max_attempts=12, log_path=str(log))
        events = load_log(log)
        report = replay(events)
        assert report.ok and report.events_checked == len(events)

    def test_tampered_log_detected(self, tmp_path):
        log = tmp_path / "sim.jsonl"
        run_sim(LearnerPolicy("perfect"), seed=5, max_attempts=6, log_path=str(log))
        events = load_log(log)
        target = next(e for e in events if e["kind"] == "AttemptClosed")
        target["payload"]["ratio"] = 0.123
        report = replay(events)
        assert not report.ok
        assert report.first_divergence == target["seq"]

    def test_shuffled_seq_is_corrupt(self):
        events = hand_built_log()
        events[1]["seq"], events[2]["seq"] = events[2]["seq"], events[1]["seq"]
        with pytest.raises(CorruptLog):
            validate_log(events)

    def test_unparseable_line_is_corrupt(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"seq": 1}\nnot json\n', encoding="utf-8")
        with pytest.raises(CorruptLog):
            load_log(path)

    def test_truncated_log_still_replays_prefix(self, tmp_path):
        log = tmp_path / "sim.jsonl"
        run_sim(LearnerPolicy("perfect"), seed=6, max_attempts=6, log_path=str(log))
        events = load_log(log)
        # cut right after a complete observation block: find the last
        # StateObserved and truncate at the end of its derived events
        report = replay(events[: len(events) // 2 ])
        assert report.events_checked == len(events) // 2 or not report.ok

    def test_log_roundtrip_bytes(self, tmp_path):
        log = tmp_path / "sim.jsonl"
        run_sim(LearnerPolicy("perfect"), seed=7, max_attempts=6, log_path=str(log))
        raw_lines = log.read_text(encoding="utf-8").splitlines()
        events = load_log(log)
        assert [dump_event(e) for e in events] == raw_lines


class TestLogInvariants:
    def test_metrics_conservation(self, tmp_path):
        log = tmp_path / "s.jsonl"
        run_sim(LearnerPolicy("noisy", p=0.8), seed=3, max_attempts=15,
                log_path=str(log))
        events = load_log(log)
        metrics = compute_metrics(events)
        duration = events[-1]["ts"] - events[0]["ts"]
        assert sum(metrics.exercise_ms) + sum(metrics.preparation_ms) <= duration

    def test_every_close_references_an_open(self, tmp_path):
        log = tmp_path / "s.jsonl"
        run_sim(LearnerPolicy("randomwalk"), seed=3, max_attempts=30,
                log_path=str(log))
        events = load_log(log)
        by_seq = {e["seq"]: e for e in events}
        closes = [e for e in events if e["kind"] == "AttemptClosed"]
        assert closes
        for event in closes:
            opened = by_seq[event["payload"]["opened_seq"]]
            assert opened["kind"] == "AttemptOpened"
            assert opened["seq"] < event["seq"]
            assert opened["payload"]["kc"] == event["payload"]["kc"]

    def test_event_seq_strictly_increasing(self, tmp_path):
        log = tmp_path / "s.jsonl"
        run_sim(LearnerPolicy("perfect"), seed=8, max_attempts=6, log_path=str(log))
        events = load_log(log)
        assert [e["seq"] for e in events] == list(range(1, len(events) + 1))
        assert all(e["kind"] in
                   __import__("cubetutor.session", fromlist=["EVENT_KINDS"]).EVENT_KINDS
                   for e in events)


class TestDeterminism:
    def test_same_transcript_same_messages(self):
        def run():
            session = started_session(engine_seed=11)
            out = [send(session, "set_mode", mode="practice", ts=1)]
            out.append(send(session, "request_task", ts=2))
            out.append(send(session, "scramble", ts=3))
            return json.dumps(out, sort_keys=True)

        assert run() == run()
