"""Model tracing and knowledge tracing.

Model tracing infers each user move from consecutive cube states and segments
the observation stream into attempts.  Segmentation is retrospective: every
(component, piece) whose pattern holds is armed as a candidate; a candidate
becomes active when its target piece starts to move and commits as an attempt
on the first observation where that piece satisfies the component's goal.
When several candidates could commit, the one whose piece moved first wins,
then the higher difficulty, then the fixed id order.  Committed attempts never
overlap: a commit discards all other candidates.  A tracer may also be
focused on one (component, piece) pair - the practice mode anchors it to the
generated task so collateral piece movements are not attributed.

Knowledge tracing grades a closed attempt by the fraction of transitions whose
exact distance-to-final-state strictly decreases (states that differ only by a
reorientation are merged first), marks it successful when the fraction exceeds
t1, and aggregates the most recent `window` attempts weighted by hint usage:

    score = sum(weight(hint_i) * success_i)      mastered = score > t2

with weights 1.0 / 0.8 / 0.5 / 0.0 for no hint / level 1 / 2 / 3, t1 = 0.8,
t2 = 2.4, window 3.  A perfect minimal attempt scores ratio 1.0; the
paper-literal mode divides by the state count instead of the transition count.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cube, task_model
from .cube import CubeState, Move, normalize_orientation
from .errors import BadLevel, NotOneMove, OpenAttempt, PatternMismatch
from .solver import GoalDistances, Stage
from .task_model import CATALOG, KcId, TargetPiece


@dataclass(frozen=True)
class StateObservation:
    state: CubeState
    ts: int


@dataclass(frozen=True)
class TracingParams:
    t1: float = 0.8
    t2: float = 2.4
    window: int = 3
    hint_weights: tuple[float, float, float, float] = (1.0, 0.8, 0.5, 0.0)
    min_steps_cap: int = 7
    ratio_denominator: str = "transitions"  # "states" is the paper-literal mode

    def __post_init__(self):
        if self.ratio_denominator not in ("transitions", "states"):
            raise ValueError(f"bad ratio_denominator {self.ratio_denominator!r}")
        if list(self.hint_weights) != sorted(self.hint_weights, reverse=True):
            raise ValueError("hint weights must be non-increasing in level")

    def weight(self, hint_level: int | None) -> float:
        return self.hint_weights[hint_level or 0]

    def to_dict(self) -> dict:
        return {
            "t1": self.t1, "t2": self.t2, "window": self.window,
            "hint_weights": list(self.hint_weights),
            "min_steps_cap": self.min_steps_cap,
            "ratio_denominator": self.ratio_denominator,
        }

    @classmethod
    def from_dict(cls, data: dict) -> TracingParams:
        kwargs = dict(data)
        if "hint_weights" in kwargs:
            kwargs["hint_weights"] = tuple(kwargs["hint_weights"])
        return cls(**kwargs)


@dataclass
class Attempt:
    """One exercise opportunity: from a pattern match to goal satisfaction."""

    kc_id: KcId
    piece: TargetPiece
    states: list[StateObservation]
    start_ts: int
    end_ts: int | None = None
    hint_level: int | None = None
    ratio: float | None = None
    success: bool | None = None
    open: bool = True
    graded: bool = False


@dataclass(frozen=True)
class SkillRecord:
    kc_id: KcId
    recent: tuple[Attempt, ...] = ()
    score: float = 0.0
    mastered: bool = False
    attempts_seen: int = 0


@dataclass(frozen=True)
class SkillRow:
    kc_id: KcId
    score: float
    mastered: bool
    attempts_seen: int


def fresh_records() -> dict[KcId, SkillRecord]:
    return {component.id: SkillRecord(component.id) for component in CATALOG}


def infer_move(prev: CubeState, nxt: CubeState) -> Move | None:
    """The unique single move mapping prev to nxt; None when the states are
    equal.  Raises NotOneMove when no single face turn or reorientation fits."""
    if prev.stickers == nxt.stickers:
        return None
    for move in cube.ALL_MOVES:
        if prev.apply(move).stickers == nxt.stickers:
            return move
    raise NotOneMove("states differ by more than one move")


def merged_states(states: list[StateObservation]) -> list[CubeState]:
    """Normalized attempt states with reorientation-only transitions merged."""
    merged: list[CubeState] = []
    for obs in states:
        normalized, _ = normalize_orientation(obs.state)
        if not merged or merged[-1].stickers != normalized.stickers:
            merged.append(normalized)
    return merged


def grade_attempt(attempt: Attempt, params: TracingParams) -> tuple[float, bool]:
    """Ratio of strictly-decreasing distance transitions toward the final
    state, and the success flag (ratio > t1).  A transition counts as
    decreasing only when both distances are within the cap; beyond-cap
    distances participate as not decreasing, so long wanderings that stroll
    back into range earn no credit for re-entering it."""
    if attempt.open:
        raise OpenAttempt("cannot grade an open attempt")
    states = merged_states(attempt.states)
    goal = GoalDistances(states[-1], params.min_steps_cap)
    distances = [goal.distance(s) for s in states]
    decreasing = sum(
        1 for a, b in zip(distances, distances[1:])
        if not a.exceeds_cap and not b.exceeds_cap and b.value < a.value
    )
    denominator = len(states) - 1 if params.ratio_denominator == "transitions" else len(states)
    ratio = decreasing / denominator
    return ratio, ratio > params.t1


def update_skill(record: SkillRecord, attempt: Attempt, params: TracingParams) -> SkillRecord:
    """Append a graded attempt to the record's window and rescore."""
    if attempt.ratio is None or attempt.success is None:
        raise OpenAttempt("attempt must be graded before scoring")
    recent = (record.recent + (attempt,))[-params.window:]
    score = sum(params.weight(a.hint_level) * (1.0 if a.success else 0.0) for a in recent)
    return SkillRecord(
        kc_id=record.kc_id,
        recent=recent,
        score=score,
        mastered=score > params.t2,
        attempts_seen=record.attempts_seen + 1,
    )


def skillometer(records: dict[KcId, SkillRecord]) -> list[SkillRow]:
    """One row per knowledge component in catalog order; never-attempted
    components report a zero score."""
    rows = []
    for component in CATALOG:
        record = records.get(component.id) or SkillRecord(component.id)
        rows.append(SkillRow(component.id, record.score, record.mastered,
                             record.attempts_seen))
    return rows


# --- trace events ------------------------------------------------------------------

@dataclass(frozen=True)
class TraceEvent:
    ts: int


@dataclass(frozen=True)
class MoveInferred(TraceEvent):
    move: Move
    synthesized: bool = False


@dataclass(frozen=True)
class Discontinuity(TraceEvent):
    reason: str


@dataclass(frozen=True)
class AttemptOpened(TraceEvent):
    attempt: Attempt


@dataclass(frozen=True)
class AttemptClosed(TraceEvent):
    attempt: Attempt
    reason: str


@dataclass(frozen=True)
class SkillUpdated(TraceEvent):
    record: SkillRecord


@dataclass(frozen=True)
class BlockPlaced(TraceEvent):
    piece: TargetPiece


@dataclass
class _Candidate:
    kc_id: KcId
    piece: TargetPiece
    pattern_index: int
    baseline_pose: tuple[int, int]
    armed_petals: int = 0
    moved: bool = False
    start_ts: int | None = None
    anchored: bool = False


def _petal_count(normalized: CubeState) -> int:
    s = normalized.stickers
    return sum(1 for p in task_model.PETAL_SLOTS if s[p] == cube.Color.WHITE)


class Tracer:
    """Sequential per-session state machine over one observation stream."""

    def __init__(self, params: TracingParams | None = None,
                 stage: Stage = Stage.WHITE_FLOWER):
        self.params = params or TracingParams()
        self.stage = stage
        self.records = fresh_records()
        self.prev: StateObservation | None = None
        self.history: list[StateObservation] = []
        self.candidates: dict[tuple, _Candidate] = {}
        self.focus: tuple[KcId, tuple] | None = None
        self.closed: list[Attempt] = []
        self._hint_marks: list[tuple[int, int]] = []
        self._focus_done = False

    # -- controls --------------------------------------------------------------

    def set_stage(self, stage: Stage) -> None:
        self.stage = stage
        self.candidates = {k: c for k, c in self.candidates.items() if c.anchored}

    def set_focus(self, kc_id: KcId | None, piece: TargetPiece | None = None) -> None:
        """Anchor segmentation to one (component, piece) pair (practice mode);
        None restores free exploration segmentation."""
        if kc_id is None:
            self.focus = None
        else:
            self.focus = (kc_id, piece.key)
        self.candidates = {}
        self._focus_done = False
        if self.prev is not None:
            self._arm(normalize_orientation(self.prev.state)[0], self.prev.ts)

    def register_hint(self, level: int, ts: int | None = None) -> None:
        """Record a served hint; the maximum level requested during an
        attempt's interval counts against that attempt."""
        if level not in (1, 2, 3):
            raise BadLevel(f"hint level must be 1..3, got {level}")
        mark_ts = ts if ts is not None else (self.prev.ts if self.prev else 0)
        self._hint_marks.append((mark_ts, level))

    def reset_baseline(self, obs: StateObservation | None) -> None:
        """Replace the current state out-of-band (task accepted, scramble)."""
        self.prev = obs
        self.history = [obs] if obs is not None else []
        self.candidates = {}
        self._hint_marks = []
        self._focus_done = False
        if obs is not None:
            self._arm(normalize_orientation(obs.state)[0], obs.ts)

    def abandon(self, reason: str, ts: int) -> list[TraceEvent]:
        """Close the best active candidate ungraded (discontinuity, stream
        end); remaining candidates are discarded."""
        active = [c for c in self.candidates.values() if c.moved]
        self.candidates = {}
        if not active:
            return []
        best = min(active, key=self._commit_order)
        attempt = self._attempt_from(best, end_ts=ts, open_=True)
        attempt.open = False
        attempt.end_ts = ts
        self.closed.append(attempt)
        return [AttemptOpened(ts, attempt), AttemptClosed(ts, attempt, reason)]

    def trailing_open_attempt(self) -> Attempt | None:
        active = [c for c in self.candidates.values() if c.moved]
        if not active:
            return None
        return self._attempt_from(min(active, key=self._commit_order), None, open_=True)

    def fail_focus(self, ts: int) -> list[TraceEvent]:
        """Close the anchored task attempt as a failed graded attempt (the
        exercise opportunity ended without the block placed).  No attempt is
        recorded when the target piece never moved."""
        if self.focus is None or self._focus_done:
            return []
        cand = self.candidates.get(self.focus)
        self.candidates = {}
        self._focus_done = True
        if cand is None or not cand.moved:
            return []
        attempt = self._attempt_from(cand, ts, open_=False)
        attempt.open = False
        attempt.end_ts = ts
        consumed = [lvl for mark_ts, lvl in self._hint_marks if mark_ts <= ts]
        self._hint_marks = [(mark_ts, lvl) for mark_ts, lvl in self._hint_marks if mark_ts > ts]
        attempt.hint_level = max(consumed) if consumed else None
        attempt.ratio = 0.0
        attempt.success = False
        attempt.graded = True
        self.closed.append(attempt)
        record = update_skill(self.records[attempt.kc_id], attempt, self.params)
        self.records[attempt.kc_id] = record
        return [AttemptOpened(ts, attempt),
                AttemptClosed(ts, attempt, "incomplete"),
                SkillUpdated(ts, record)]

    # -- observation stream ------------------------------------------------------

    def observe(self, obs: StateObservation) -> list[TraceEvent]:
        if self.prev is None:
            self.reset_baseline(obs)
            return []
        if obs.ts <= self.prev.ts:
            raise ValueError("observation timestamps must strictly increase")
        events: list[TraceEvent] = []
        try:
            move = infer_move(self.prev.state, obs.state)
        except NotOneMove:
            bridge = self._reconcile(self.prev.state, obs.state)
            if bridge is None:
                events.append(Discontinuity(obs.ts, "no-move-sequence"))
                events.extend(self.abandon("discontinuity", obs.ts))
                self.prev = obs
                self.history = [obs]
                self._arm(normalize_orientation(obs.state)[0], obs.ts)
                return events
            mid_state, m1, m2 = bridge
            mid = StateObservation(mid_state, min(self.prev.ts + 1, obs.ts))
            events.append(MoveInferred(mid.ts, m1, synthesized=True))
            events.extend(self._transition(mid))
            self.prev = mid
            events.append(MoveInferred(obs.ts, m2, synthesized=True))
            events.extend(self._transition(obs))
            self.prev = obs
            return events
        if move is None:
            self.prev = obs
            return events
        events.append(MoveInferred(obs.ts, move))
        events.extend(self._transition(obs))
        self.prev = obs
        return events

    def _reconcile(self, prev: CubeState, nxt: CubeState):
        gens = [m for m in cube.ALL_MOVES if m.amount != cube.HALF]
        for m1 in gens:
            mid = prev.apply(m1)
            for m2 in gens:
                if mid.apply(m2).stickers == nxt.stickers:
                    return mid, m1, m2
        return None

    # -- segmentation ----------------------------------------------------------

    def _transition(self, obs: StateObservation) -> list[TraceEvent]:
        prev_n, _ = normalize_orientation(self.prev.state)
        new_n, _ = normalize_orientation(obs.state)
        self.history.append(obs)
        if prev_n.stickers == new_n.stickers:
            return []  # pure reorientation: merged, not a transition
        events: list[TraceEvent] = []
        events.extend(self._feedback(prev_n, new_n, obs.ts))

        ready: list[_Candidate] = []
        for cand in list(self.candidates.values()):
            pose = self._piece_pose(new_n, cand.piece)
            if not cand.moved:
                if pose is None:
                    del self.candidates[(cand.kc_id, cand.piece.key)]
                    continue
                if pose != cand.baseline_pose:
                    cand.moved = True
                    cand.start_ts = obs.ts
            if cand.moved and self._goal(cand, new_n):
                ready.append(cand)
        if ready:
            winner = min(ready, key=self._commit_order)
            events.extend(self._commit(winner, obs))
        self._arm(new_n, obs.ts)
        return events

    @staticmethod
    def _commit_order(c: _Candidate):
        return (c.start_ts, -task_model.kc(c.kc_id).difficulty,
                task_model._ID_ORDER[c.kc_id])

    def _goal(self, cand: _Candidate, normalized: CubeState) -> bool:
        component = task_model.kc(cand.kc_id)
        if not task_model.goal_met(component, cand.piece, normalized):
            return False
        if component.stage is Stage.WHITE_FLOWER:
            # placing a daisy block means the flower grew: an insertion that
            # displaces another petal does not close the attempt
            return _petal_count(normalized) > cand.armed_petals
        return True

    def _arm(self, normalized: CubeState, ts: int) -> None:
        petals = _petal_count(normalized)
        if self.focus is not None:
            if self._focus_done:
                return  # the anchored task attempt already committed
            kc_id, piece_key = self.focus
            if (kc_id, piece_key) not in self.candidates:
                kind, colors = piece_key
                pose = self._piece_pose(normalized, TargetPiece(kind, colors, 0))
                if pose is not None:
                    piece = TargetPiece(kind, colors, pose[0])
                    self.candidates[(kc_id, piece_key)] = _Candidate(
                        kc_id, piece, len(self.history) - 1, pose,
                        armed_petals=petals, anchored=True)
            return
        matched = set()
        for component, piece in task_model.match_kc(normalized):
            if component.stage != self.stage:
                continue
            key = (component.id, piece.key)
            matched.add(key)
            cand = self.candidates.get(key)
            if cand is None:
                self.candidates[key] = _Candidate(
                    component.id, piece, len(self.history) - 1,
                    self._piece_pose(normalized, piece), armed_petals=petals)
            elif not cand.moved:
                cand.pattern_index = len(self.history) - 1
                cand.baseline_pose = self._piece_pose(normalized, piece)
                cand.armed_petals = petals
        for key, cand in list(self.candidates.items()):
            if not cand.moved and key not in matched:
                del self.candidates[key]

    @staticmethod
    def _piece_pose(normalized: CubeState, piece: TargetPiece) -> tuple[int, int] | None:
        try:
            located = task_model.find_piece(normalized, piece.kind, piece.colors)
        except PatternMismatch:
            return None
        if piece.kind == "edge":
            white = task_model.white_pos_of_edge(normalized, located.slot)
        else:
            white = task_model.white_pos_of_corner(normalized, located.slot)
        return located.slot, white

    def _attempt_from(self, cand: _Candidate, end_ts, open_: bool) -> Attempt:
        states = list(self.history[cand.pattern_index:])
        return Attempt(
            kc_id=cand.kc_id,
            piece=cand.piece,
            states=states,
            start_ts=cand.start_ts if cand.start_ts is not None else states[0].ts,
            end_ts=end_ts,
            open=open_,
        )

    def _commit(self, cand: _Candidate, obs: StateObservation) -> list[TraceEvent]:
        if cand.anchored:
            self._focus_done = True
        attempt = self._attempt_from(cand, obs.ts, open_=False)
        consumed = [lvl for ts, lvl in self._hint_marks if ts <= obs.ts]
        self._hint_marks = [(ts, lvl) for ts, lvl in self._hint_marks if ts > obs.ts]
        attempt.hint_level = max(consumed) if consumed else None
        attempt.ratio, attempt.success = grade_attempt(attempt, self.params)
        attempt.graded = True
        self.closed.append(attempt)
        record = update_skill(self.records[attempt.kc_id], attempt, self.params)
        self.records[attempt.kc_id] = record
        self.candidates = {}
        self.history = [obs]
        return [AttemptOpened(obs.ts, attempt),
                AttemptClosed(obs.ts, attempt, "goal"),
                SkillUpdated(obs.ts, record)]

    def _feedback(self, prev_n: CubeState, new_n: CubeState, ts: int) -> list[TraceEvent]:
        events = []
        if self.stage is Stage.WHITE_FLOWER:
            for piece in task_model.white_edges(new_n):
                if task_model.is_petal(new_n, piece) and not task_model.is_petal(prev_n, piece):
                    events.append(BlockPlaced(ts, piece))
        elif self.stage is Stage.WHITE_CROSS:
            for piece in task_model.white_edges(new_n):
                if task_model.edge_placed(new_n, piece.slot):
                    old = task_model.find_piece(prev_n, "edge", piece.colors)
                    if not task_model.edge_placed(prev_n, old.slot):
                        events.append(BlockPlaced(ts, piece))
        else:
            for piece in task_model.white_corners(new_n):
                if task_model.corner_placed(new_n, piece.slot):
                    old = task_model.find_piece(prev_n, "corner", piece.colors)
                    if not task_model.corner_placed(prev_n, old.slot):
                        events.append(BlockPlaced(ts, piece))
        return events


def segment_attempts(history: list[StateObservation], active_stage: Stage,
                     params: TracingParams | None = None) -> list[Attempt]:
    """Non-overlapping attempts segmented from a full observation history;
    an unterminated trailing attempt is returned still open and ungraded."""
    tracer = Tracer(params, active_stage)
    for obs in history:
        tracer.observe(obs)
    attempts = list(tracer.closed)
    trailing = tracer.trailing_open_attempt()
    if trailing is not None:
        attempts.append(trailing)
    return attempts
