"""Quarter-turn-metric distance search and the three first-layer stage goals.

Distances count 90-degree face turns as 1 and 180-degree turns as 2; whole-cube
reorientations are free (both endpoints are orientation-normalized before the
search).  The search is a bidirectional breadth-first search over the 12
quarter-turn generators with numpy-batched frontier expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import total_ordering

import numpy as np

from . import cube
from .cube import (
    B5, B7, B8, B9, CubeState, D1, D2, D3, D4, D5, D6, D7, D8, D9,
    F5, F7, F8, F9, L5, L7, L8, L9, Move, R5, R7, R8, R9,
    U2, U4, U5, U6, U8, StickerMask, normalize_orientation,
)
from .errors import IllegalState

QT_NOTATION = tuple(m.notation for m in cube.QUARTER_TURNS)
_QT_SRC = np.array([cube.src_table(m) for m in cube.QUARTER_TURNS], dtype=np.intp)
_QT_MOVES = cube.QUARTER_TURNS


@total_ordering
@dataclass(frozen=True)
class DistanceResult:
    """Exact distance if <= cap, else the exceeds-cap marker (value None).

    Exceeds-cap compares greater than any finite distance and equal to itself.
    """

    value: int | None
    cap: int

    def __post_init__(self):
        if self.value is not None and not 0 <= self.value <= self.cap:
            raise ValueError(f"distance {self.value} outside [0, {self.cap}]")

    @property
    def exceeds_cap(self) -> bool:
        return self.value is None

    def _key(self) -> float:
        return float("inf") if self.value is None else float(self.value)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistanceResult):
            return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other) -> bool:
        if not isinstance(other, DistanceResult):
            return NotImplemented
        return self._key() < other._key()

    def __repr__(self) -> str:
        return f"DistanceResult(>{self.cap})" if self.exceeds_cap else f"DistanceResult({self.value})"


def _expand(states: list[bytes]) -> list[bytes]:
    """All quarter-turn children, parent-major then generator order."""
    arr = np.frombuffer(b"".join(states), dtype=np.uint8).reshape(len(states), 54)
    buf = arr[:, _QT_SRC].tobytes()
    return [buf[o:o + 54] for o in range(0, len(buf), 54)]


def _check_legal(state: CubeState, name: str) -> CubeState:
    if not cube.is_legal(state):
        raise IllegalState(f"{name} state is not reachable from solved")
    return normalize_orientation(state)[0]


class GoalDistances:
    """Memoized capped distances to one fixed goal state.

    The backward search layers from the goal are grown lazily and shared
    across queries, so grading one attempt (many states, one final state)
    costs a single backward expansion.
    """

    def __init__(self, goal: CubeState, cap: int):
        if cap < 0:
            raise ValueError("cap must be >= 0")
        self.cap = cap
        self.goal = _check_legal(goal, "goal")
        root = self.goal.stickers
        self._bvis: dict[bytes, int] = {root: 0}
        self._bfrontier: list[bytes] = [root]
        self._bd = 0
        self._bd_target = (cap + 1) // 2

    def _extend_backward(self) -> None:
        self._bd += 1
        new = []
        vis = self._bvis
        for child in _expand(self._bfrontier):
            if child not in vis:
                vis[child] = self._bd
                new.append(child)
        self._bfrontier = new

    def distance(self, state: CubeState) -> DistanceResult:
        start = _check_legal(state, "from").stickers
        bvis = self._bvis
        hit = bvis.get(start)
        if hit is not None:
            return DistanceResult(hit, self.cap)
        fvis = {start: 0}
        frontier = [start]
        fd = 0
        best = None
        while True:
            if best is not None and best <= fd + self._bd:
                return DistanceResult(best, self.cap)
            if fd + self._bd >= self.cap:
                if best is not None and best <= self.cap:
                    return DistanceResult(best, self.cap)
                return DistanceResult(None, self.cap)
            if self._bd < self._bd_target and self._bd <= fd:
                self._extend_backward()
                for s in self._bfrontier:
                    d = fvis.get(s)
                    if d is not None and (best is None or d + self._bd < best):
                        best = d + self._bd
            else:
                fd += 1
                new = []
                for child in _expand(frontier):
                    if child not in fvis:
                        fvis[child] = fd
                        new.append(child)
                        d = bvis.get(child)
                        if d is not None and (best is None or fd + d < best):
                            best = fd + d
                frontier = new


def min_steps(from_state: CubeState, to_state: CubeState, cap: int) -> DistanceResult:
    """Exact quarter-turn distance if <= cap, else the exceeds-cap marker."""
    return GoalDistances(to_state, cap).distance(from_state)


def min_steps_path(from_state: CubeState, to_state: CubeState, cap: int) -> list[Move] | None:
    """A witness move sequence of minimal length, or None beyond the cap."""
    a = _check_legal(from_state, "from").stickers
    b = _check_legal(to_state, "to").stickers
    if a == b:
        return []
    # parent maps: state -> (previous state, generator index)
    fpar: dict[bytes, tuple[bytes, int] | None] = {a: None}
    bpar: dict[bytes, tuple[bytes, int] | None] = {b: None}
    ffr, bfr = [a], [b]
    fd = bd = 0
    meet = None

    def sweep(frontier, vis, other):
        nonlocal meet
        new = []
        for idx, child in enumerate(_expand(frontier)):
            if child not in vis:
                vis[child] = (frontier[idx // 12], idx % 12)
                new.append(child)
                if meet is None and child in other:
                    meet = child
        return new

    while meet is None and fd + bd < cap:
        if len(ffr) <= len(bfr):
            fd += 1
            ffr = sweep(ffr, fpar, bpar)
        else:
            bd += 1
            bfr = sweep(bfr, bpar, fpar)
    if meet is None:
        return None

    moves: list[Move] = []
    node = meet
    while fpar[node] is not None:
        prev, gen = fpar[node]
        moves.append(_QT_MOVES[gen])
        node = prev
    moves.reverse()
    node = meet
    while bpar[node] is not None:
        prev, gen = bpar[node]
        moves.append(_QT_MOVES[gen].inverse())
        node = prev
    # The meet point my be off the geodesic by the parity of the sweep order;
    # verify and fall back to the exact length via min_steps.
    exact = min_steps(from_state, to_state, cap)
    if not exact.exceeds_cap and len(moves) > exact.value:
        return _shortest_path_exact(a, b, exact.value)
    return moves


def _shortest_path_exact(a: bytes, b: bytes, length: int) -> list[Move]:
    """Forward BFS with parent tracking, bounded by a known exact length."""
    par: dict[bytes, tuple[bytes, int] | None] = {a: None}
    frontier = [a]
    for _ in range(length):
        new = []
        for idx, child in enumerate(_expand(frontier)):
            if child not in par:
                par[child] = (frontier[idx // 12], idx % 12)
                new.append(child)
        frontier = new
        if b in par:
            break
    moves = []
    node = b
    while par[node] is not None:
        prev, gen = par[node]
        moves.append(_QT_MOVES[gen])
        node = prev
    moves.reverse()
    return moves


# --- stage goals ----------------------------------------------------------------

class Stage(IntEnum):
    WHITE_FLOWER = 0
    WHITE_CROSS = 1
    FOUR_CORNERS = 2


_PETAL_SLOTS = (U2, U4, U6, U8)
_CROSS_PAIRS = ((D2, F8, F5), (D6, R8, R5), (D4, L8, L5), (D8, B8, B5))
_BOTTOM_ROWS = (F7, F8, F9, R7, R8, R9, L7, L8, L9, B7, B8, B9)

STAGE_MASKS: dict[Stage, StickerMask] = {
    Stage.WHITE_FLOWER: frozenset(_PETAL_SLOTS) | {U5},
    Stage.WHITE_CROSS: frozenset(p for pair in _CROSS_PAIRS for p in pair) | {D5},
    Stage.FOUR_CORNERS: (frozenset(range(D1, D9 + 1)) | frozenset(_BOTTOM_ROWS)
                         | {F5, R5, L5, B5}),
}


def _flower_met(s: bytes) -> bool:
    return all(s[p] == cube.Color.WHITE for p in _PETAL_SLOTS)


def _cross_met(s: bytes) -> bool:
    return all(s[d] == cube.Color.WHITE and s[side] == s[center]
               for d, side, center in _CROSS_PAIRS)


def _corners_met(s: bytes) -> bool:
    if not _cross_met(s):
        return False
    if any(s[p] != cube.Color.WHITE for p in (D1, D3, D7, D9)):
        return False
    return all(s[p] == s[(p // 9) * 9 + 4] for p in _BOTTOM_ROWS)


_STAGE_PREDICATES = {
    Stage.WHITE_FLOWER: _flower_met,
    Stage.WHITE_CROSS: _cross_met,
    Stage.FOUR_CORNERS: _corners_met,
}


def stage_goal_met(state: CubeState, stage: Stage) -> bool:
    normalized, _ = normalize_orientation(state)
    return _STAGE_PREDICATES[stage](normalized.stickers)


def solve_first_layer(state: CubeState) -> list[Move]:
    """Face-turn sequence reaching the Four Corners goal from `state`.

    Greedy concatenation of canonical knowledge-component macros: daisy petals
    first, then cross matches, then corners; within a stage the piece with the
    shortest macro goes first.  Not globally optimal.
    """
    from . import task_model  # deferred: task_model builds on this module

    if not cube.is_legal(state):
        raise IllegalState("cannot solve an unreachable state")
    current = state
    solution: list[Move] = []
    for _ in range(16):
        if stage_goal_met(current, Stage.FOUR_CORNERS):
            return solution
        normalized, _ = normalize_orientation(current)
        matches = task_model.match_kc(normalized)
        stage = _solving_stage(normalized)
        candidates = [(kc, piece) for kc, piece in matches if kc.stage == stage]
        if not candidates:
            raise IllegalState("no applicable knowledge component; state out of model")
        best = min(
            candidates,
            key=lambda m: (sum(mv.quarter_turns
                               for mv in task_model.canonical_macro(m[0], m[1], normalized)),
                           m[0].order_index),
        )
        macro = task_model.canonical_macro(best[0], best[1], normalized)
        translated = _translate_to_frame(macro, current)
        solution.extend(translated)
        current = current.apply_all(translated)
    raise IllegalState("first-layer solve did not converge")


def _solving_stage(normalized: CubeState) -> Stage:
    from . import task_model

    s = normalized.stickers
    if _cross_met(s):
        return Stage.FOUR_CORNERS
    unplaced = task_model.unplaced_white_edges(normalized)
    if all(task_model.is_petal(normalized, piece) for piece in unplaced):
        return Stage.WHITE_CROSS
    return Stage.WHITE_FLOWER


def _translate_to_frame(macro: list[Move], raw: CubeState) -> list[Move]:
    """Rewrite face turns computed on the normalized state so they act
    identically on the raw (unnormalized) state."""
    _, word = normalize_orientation(raw)
    if not word:
        return list(macro)
    src = cube.compose_src(word)
    face_map = {}
    for letter in cube.FACE_LETTERS:
        f = cube.Face[letter]
        origin = src[9 * f + 4] // 9
        face_map[letter] = cube.Face(origin).name
    out = []
    for move in macro:
        if move.is_face_turn:
            out.append(Move("face", face_map[move.target], move.amount))
        else:
            out.append(move)
    return out
