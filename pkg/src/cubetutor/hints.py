"""Three-level hint payloads.

Level 1 highlights the target block and its destination, level 2 additionally
grays out every sticker that is irrelevant to the step, and level 3 adds the
canonical solution word as annotated step-by-step guidance.  The information
content grows with the level: the highlight set is identical at all levels,
the grayout appears from level 2, and steps appear only at level 3.

All sticker positions in the payload index the state exactly as the caller
passed it (no hidden renormalization), so a renderer can tint its current
view directly; steps likewise apply to the passed state.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import cube, task_model
from .cube import CubeState, Move, StickerMask, normalize_orientation
from .errors import BadLevel
from .solver import STAGE_MASKS, Stage
from .task_model import KnowledgeComponent, TargetPiece

_FACE_WORDS = {
    "U": "top layer",
    "D": "bottom layer",
    "F": "front face",
    "B": "back face",
    "L": "left face",
    "R": "right face",
}


@dataclass(frozen=True)
class HintPayload:
    level: int
    kc_id: task_model.KcId
    piece: TargetPiece
    highlight: StickerMask
    grayout: StickerMask
    steps: tuple[tuple[Move, str], ...]

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "kc": self.kc_id.value,
            "piece": {"kind": self.piece.kind,
                      "colors": sorted(c.name.lower() for c in self.piece.colors)},
            "highlight": sorted(self.highlight),
            "grayout": sorted(self.grayout),
            "steps": [{"move": m.notation, "text": text} for m, text in self.steps],
        }


def annotate(move: Move) -> str:
    if move.is_face_turn:
        name = _FACE_WORDS[move.target]
    else:
        name = "whole cube"
    if move.amount == cube.HALF:
        return f"{name} clockwise ×2"
    direction = "clockwise" if move.amount == cube.CW90 else "counterclockwise"
    return f"{name} {direction} ×1"


def make_hint(state: CubeState, component: KnowledgeComponent, piece: TargetPiece,
              level: int) -> HintPayload:
    """Build the hint payload for an active (component, piece) on `state`.

    Raises BadLevel outside 1..3 and PatternMismatch when the pattern does
    not hold (canonical macro construction requires it).
    """
    if level not in (1, 2, 3):
        raise BadLevel(f"hint level must be 1..3, got {level}")
    macro = task_model.canonical_macro(component, piece, state)

    def positions(in_state: CubeState) -> frozenset:
        located = task_model.find_piece(in_state, piece.kind, piece.colors)
        slots = cube.EDGE_SLOTS if piece.kind == "edge" else cube.CORNER_SLOTS
        return frozenset(slots[located.slot])

    target = positions(state)
    destination = positions(state.apply_all(macro))
    highlight = target | destination

    grayout: frozenset = frozenset()
    if level >= 2:
        keep = highlight | _placed_structure(state, component.stage)
        grayout = frozenset(range(54)) - keep

    steps = tuple((m, annotate(m)) for m in macro) if level == 3 else ()
    return HintPayload(level, component.id, piece, StickerMask(highlight),
                       StickerMask(grayout), steps)


def _placed_structure(state: CubeState, stage: Stage) -> frozenset:
    """Stage-relevant placed stickers plus the stage's anchor centers, in the
    frame of the given state."""
    normalized, word = normalize_orientation(state)
    keep = {p for p in STAGE_MASKS[stage] if p % 9 == 4}  # anchor centers
    if stage is Stage.WHITE_FLOWER:
        for piece in task_model.white_edges(normalized):
            if task_model.is_petal(normalized, piece):
                keep.update(cube.EDGE_SLOTS[piece.slot])
    else:
        for piece in task_model.white_edges(normalized):
            if task_model.edge_placed(normalized, piece.slot):
                keep.update(cube.EDGE_SLOTS[piece.slot])
        if stage is Stage.FOUR_CORNERS:
            for piece in task_model.white_corners(normalized):
                if task_model.corner_placed(normalized, piece.slot):
                    keep.update(cube.CORNER_SLOTS[piece.slot])
    src = cube.compose_src(word)
    return frozenset(src[p] for p in keep)
