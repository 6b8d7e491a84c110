import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_distances, oracle_distance, random_legal_state, random_states

from cubetutor import cube, task_model, tracing
from cubetutor.cube import SOLVED, parse_move, parse_moves
from cubetutor.errors import BadLevel, NotOneMove, OpenAttempt
from cubetutor.solver import Stage
from cubetutor.task_model import KcId, kc, kc_pattern_positions
from cubetutor.taskgen import generate_task, instantiate_template
from cubetutor.tracing import (
    Attempt, SkillRecord, StateObservation, Tracer, TracingParams,
    fresh_records, grade_attempt, infer_move, segment_attempts, skillometer,
    update_skill,
)


def graded(success, hint=None):
    piece = task_model.TargetPiece(
        "edge", frozenset((cube.Color.WHITE, cube.Color.GREEN)), 5)
    return Attempt(KcId.SIDE, piece, [], 0, end_ts=1000, hint_level=hint,
                   ratio=1.0 if success else 0.0, success=success,
                   open=False, graded=True)


def attempt_from_word(start, word):
    """Attempt whose states follow `word` from `start`, one move per second."""
    states = [StateObservation(start, 0)]
    current = start
    for i, move in enumerate(parse_moves(word), start=1):
        current = current.apply(move)
        states.append(StateObservation(current, 1000 * i))
    piece = task_model.TargetPiece(
        "edge", frozenset((cube.Color.WHITE, cube.Color.GREEN)), 5)
    return Attempt(KcId.SIDE, piece, states, 1000, end_ts=states[-1].ts,
                   open=False)


class TestInferMove:
    def test_no_change(self):
        state = random_legal_state(1)
        assert infer_move(state, state) is None

    def test_all_moves_inverted_on_random_states(self):
        for state in random_states(10, offset=50):
            for move in cube.ALL_MOVES:
                assert infer_move(state, state.apply(move)) == move

    def test_two_face_turns_rejected(self):
        state = random_legal_state(2)
        after = state.apply(parse_move("R")).apply(parse_move("U"))
        # oracle: the exhaustive template set contains no single mapping move
        assert all(state.apply(m) != after for m in cube.ALL_MOVES)
        with pytest.raises(NotOneMove):
            infer_move(state, after)


class TestGrading:
    def test_perfect_descent(self):
        # oracle-first: freeze the expected distances with plain BFS
        goal = random_legal_state(31)
        word = "R U R' U'"
        start = goal.apply_all(m.inverse() for m in reversed(parse_moves(word)))
        attempt = attempt_from_word(start, word)
        oracle = naive_distances(attempt.states[-1].state, 4)
        dists = [oracle_distance(oracle, obs.state) for obs in attempt.states]
        assert dists == [4, 3, 2, 1, 0]

        ratio, success = grade_attempt(attempt, TracingParams())
        assert ratio == 1.0 and success

        literal = TracingParams(ratio_denominator="states")
        ratio, success = grade_attempt(attempt, literal)
        assert ratio == pytest.approx(4 / 5) and not success  # 0.8 is not > 0.8

    def test_wandering_attempt_fails(self):
        goal = random_legal_state(32)
        # ten moves that oscillate before finishing: exactly 60% of the
        # transitions decrease
        word = "R R' R R' R R' R R' R U"
        attempt = attempt_from_word(goal, word)
        oracle = naive_distances(attempt.states[-1].state, 4)
        dists = [oracle_distance(oracle, obs.state) for obs in attempt.states]
        assert dists == [2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 0]
        decreasing = sum(1 for a, b in zip(dists, dists[1:]) if b < a)
        assert decreasing / (len(dists) - 1) == pytest.approx(0.6)

        ratio, success = grade_attempt(attempt, TracingParams())
        assert ratio == pytest.approx(0.6) and not success

    def test_beyond_cap_transitions_earn_no_credit(self):
        goal = random_legal_state(33)
        away = "R U F L D B R U F L"  # wander far, then walk back the last move
        start = goal.apply_all(m.inverse() for m in reversed(parse_moves(away)))
        attempt = attempt_from_word(start, away)
        params = TracingParams(min_steps_cap=4)
        ratio, success = grade_attempt(attempt, params)
        assert not success
        assert ratio < 0.8

    def test_reorients_merged(self):
        goal = random_legal_state(34)
        word = "R y U"
        start = goal.apply_all(m.inverse() for m in reversed(parse_moves(word)))
        attempt = attempt_from_word(start, word)
        merged = tracing.merged_states(attempt.states)
        assert len(merged) == 3  # the reorientation-only transition collapses
        ratio, success = grade_attempt(attempt, TracingParams())
        assert ratio == 1.0 and success

    def test_open_attempt_rejected(self):
        attempt = attempt_from_word(random_legal_state(35), "R")
        attempt.open = True
        with pytest.raises(OpenAttempt):
            grade_attempt(attempt, TracingParams())

    def test_prepending_descending_prefix_never_lowers_ratio(self):
        goal = random_legal_state(36)
        for word in ("R U", "R U R' F", "R U U"):
            moves = parse_moves(word)
            start = goal.apply_all(m.inverse() for m in reversed(moves))
            base = attempt_from_word(start, word)
            ratio_base, _ = grade_attempt(base, TracingParams())
            longer_start = start.apply(parse_move("F'"))
            longer = attempt_from_word(longer_start, "F " + word)
            ratio_longer, _ = grade_attempt(longer, TracingParams())
            assert ratio_longer >= ratio_base


class TestSkillTracking:
    def test_three_clean_successes_master(self):
        params = TracingParams()
        record = SkillRecord(KcId.SIDE)
        for _ in range(3):
            record = update_skill(record, graded(True), params)
        assert record.score == pytest.approx(3.0) and record.mastered

    def test_level_two_hint_weight(self):
        params = TracingParams()
        record = SkillRecord(KcId.SIDE)
        for hint in (None, 2, None):
            record = update_skill(record, graded(True, hint), params)
        assert record.score == pytest.approx(2.5) and record.mastered

    def test_level_three_hint_weight(self):
        params = TracingParams()
        record = SkillRecord(KcId.SIDE)
        for hint in (None, 3, None):
            record = update_skill(record, graded(True, hint), params)
        assert record.score == pytest.approx(2.0) and not record.mastered

    def test_window_eviction_hysteresis(self):
        params = TracingParams()
        record = SkillRecord(KcId.SIDE)
        for _ in range(3):
            record = update_skill(record, graded(True), params)
        record = update_skill(record, graded(False), params)
        assert record.score == pytest.approx(2.0) and not record.mastered
        assert record.attempts_seen == 4

    def test_skillometer_fresh(self):
        rows = skillometer(fresh_records())
        assert len(rows) == 11
        assert all(r.score == 0 and not r.mastered and r.attempts_seen == 0 for r in rows)
        assert [r.kc_id for r in rows] == [c.id for c in task_model.CATALOG]

    def test_skillometer_after_side_mastery(self):
        records = fresh_records()
        params = TracingParams()
        for _ in range(3):
            records[KcId.SIDE] = update_skill(records[KcId.SIDE], graded(True), params)
        rows = skillometer(records)
        assert sum(1 for r in rows if r.mastered) == 1
        assert rows[0].kc_id is KcId.SIDE and rows[0].mastered


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.sampled_from([None, 1, 2, 3])),
                min_size=1, max_size=6),
       st.integers(0, 5))
def test_raising_hint_level_never_increases_score(history, bump_index):
    params = TracingParams()
    record = SkillRecord(KcId.SIDE)
    bumped = SkillRecord(KcId.SIDE)
    for i, (success, hint) in enumerate(history):
        record = update_skill(record, graded(success, hint), params)
        worse = 3 if i == bump_index % len(history) else hint
        bumped = update_skill(bumped, graded(success, worse), params)
    assert bumped.score <= record.score + 1e-9


def observations_for(task_state, moves, start_ts=0):
    obs = [StateObservation(task_state, start_ts)]
    current = task_state
    for i, move in enumerate(moves, start=1):
        current = current.apply(move)
        obs.append(StateObservation(current, start_ts + 1000 * i))
    return obs


class TestSegmentation:
    def test_macro_replay_yields_one_attempt(self):
        task = generate_task(KcId.SIDE, 3)
        macro = task_model.canonical_macro(kc(KcId.SIDE), task.piece, task.state)
        history = observations_for(task.state, macro)
        attempts = segment_attempts(history, Stage.WHITE_FLOWER)
        closed = [a for a in attempts if not a.open]
        assert len(closed) == 1
        assert closed[0].kc_id is KcId.SIDE
        assert closed[0].success and closed[0].ratio == 1.0

    def test_two_sequential_insertions(self):
        task = generate_task(KcId.SIDE, 11)
        state = task.state
        moves = list(task_model.canonical_macro(kc(KcId.SIDE), task.piece, state))
        mid = state.apply_all(moves)
        nxt = [(c, p) for c, p in task_model.match_kc(mid)
               if c.stage is Stage.WHITE_FLOWER]
        component, piece = nxt[0]
        moves2 = task_model.canonical_macro(component, piece, mid)
        history = observations_for(state, moves + list(moves2))
        attempts = [a for a in segment_attempts(history, Stage.WHITE_FLOWER) if not a.open]
        assert len(attempts) == 2
        assert attempts[0].end_ts <= attempts[1].start_ts

    def test_no_pattern_no_attempts(self):
        # turns of the yellow layer never move a white piece on a solved cube
        history = observations_for(SOLVED, parse_moves("D D'"))
        assert segment_attempts(history, Stage.WHITE_FLOWER) == []

    def test_trailing_open_attempt(self):
        task = generate_task(KcId.MATCH, 5)
        macro = task_model.canonical_macro(kc(KcId.MATCH), task.piece, task.state)
        history = observations_for(task.state, macro[:-1])  # stop short of goal
        attempts = segment_attempts(history, Stage.WHITE_CROSS)
        assert any(a.open for a in attempts)
        assert all(a.ratio is None for a in attempts if a.open)

    def test_timestamps_must_increase(self):
        tracer = Tracer()
        tracer.observe(StateObservation(SOLVED, 5))
        with pytest.raises(ValueError):
            tracer.observe(StateObservation(SOLVED.apply(parse_move("R")), 5))

    def test_discontinuity_abandons(self):
        task = generate_task(KcId.SIDE, 3)
        tracer = Tracer(stage=Stage.WHITE_FLOWER)
        tracer.observe(StateObservation(task.state, 0))
        jumped = task.state.apply_all(parse_moves("R U F"))
        events = tracer.observe(StateObservation(jumped, 1000))
        kinds = [type(e).__name__ for e in events]
        assert "Discontinuity" in kinds

    def test_two_move_gap_reconciled(self):
        state = random_legal_state(40)
        tracer = Tracer()
        tracer.observe(StateObservation(state, 0))
        after = state.apply_all(parse_moves("R U"))
        events = tracer.observe(StateObservation(after, 1000))
        moves = [e for e in events if isinstance(e, tracing.MoveInferred)]
        assert len(moves) == 2 and all(m.synthesized for m in moves)

    def test_focus_limits_attribution(self):
        task = generate_task(KcId.SIDE, 3)
        tracer = Tracer(stage=Stage.WHITE_FLOWER)
        tracer.set_focus(KcId.SIDE, task.piece)
        tracer.reset_baseline(StateObservation(task.state, 0))
        macro = task_model.canonical_macro(kc(KcId.SIDE), task.piece, task.state)
        events = []
        current = task.state
        for i, move in enumerate(macro, start=1):
            current = current.apply(move)
            events += tracer.observe(StateObservation(current, 1000 * i))
        closes = [e for e in events if isinstance(e, tracing.AttemptClosed)]
        assert len(closes) == 1 and closes[0].attempt.kc_id is KcId.SIDE

    def test_fail_focus_counts_as_failed_attempt(self):
        task = generate_task(KcId.MATCH, 6)
        tracer = Tracer(stage=Stage.WHITE_CROSS)
        tracer.set_focus(KcId.MATCH, task.piece)
        tracer.reset_baseline(StateObservation(task.state, 0))
        macro = task_model.canonical_macro(kc(KcId.MATCH), task.piece, task.state)
        current = task.state.apply(macro[0])
        tracer.observe(StateObservation(current, 1000))
        events = tracer.fail_focus(2000)
        closes = [e for e in events if isinstance(e, tracing.AttemptClosed)]
        assert len(closes) == 1
        attempt = closes[0].attempt
        assert attempt.graded and not attempt.success and attempt.ratio == 0.0
        assert tracer.records[KcId.MATCH].attempts_seen == 1

    def test_untouched_task_records_no_attempt(self):
        task = generate_task(KcId.SIDE, 9)
        tracer = Tracer(stage=Stage.WHITE_FLOWER)
        tracer.set_focus(KcId.SIDE, task.piece)
        tracer.reset_baseline(StateObservation(task.state, 0))
        tracer.observe(StateObservation(task.state.apply(parse_move("D")), 1000))
        assert tracer.fail_focus(2000) == []
        assert tracer.records[KcId.SIDE].attempts_seen == 0


class TestHintAccounting:
    def test_max_rule(self):
        tracer = Tracer()
        tracer.register_hint(2, 0)
        tracer.register_hint(1, 1)
        assert max(l for _, l in tracer._hint_marks) == 2
        tracer.register_hint(3, 2)
        tracer.register_hint(1, 3)
        assert max(l for _, l in tracer._hint_marks) == 3

    def test_bad_level(self):
        with pytest.raises(BadLevel):
            Tracer().register_hint(0)

    def test_hint_lands_on_committed_attempt(self):
        task = generate_task(KcId.SIDE, 4)
        tracer = Tracer(stage=Stage.WHITE_FLOWER)
        tracer.set_focus(KcId.SIDE, task.piece)
        tracer.reset_baseline(StateObservation(task.state, 0))
        tracer.register_hint(2, 100)
        macro = task_model.canonical_macro(kc(KcId.SIDE), task.piece, task.state)
        events = []
        current = task.state
        for i, move in enumerate(macro, start=1):
            current = current.apply(move)
            events += tracer.observe(StateObservation(current, 1000 * i))
        attempt = next(e.attempt for e in events if isinstance(e, tracing.AttemptClosed))
        assert attempt.hint_level == 2


class TestMacroReplayAlwaysSucceeds:
    def test_every_component_template(self):
        params = TracingParams()
        for component in task_model.CATALOG:
            for template in kc_pattern_positions(component):
                state, piece = instantiate_template(component.id, template, 21)
                tracer = Tracer(params, stage=component.stage)
                tracer.set_focus(component.id, piece)
                tracer.reset_baseline(StateObservation(state, 0))
                current = state
                closes = []
                for i, move in enumerate(
                        task_model.canonical_macro(component, piece, state), start=1):
                    current = current.apply(move)
                    closes += [e for e in tracer.observe(StateObservation(current, 1000 * i))
                               if isinstance(e, tracing.AttemptClosed)]
                assert len(closes) == 1, (component.id, template)
                attempt = closes[0].attempt
                assert attempt.success and attempt.hint_level is None
                assert attempt.ratio == 1.0
