"""The 11 first-layer knowledge components: patterns, goals, canonical macros.

All patterns are evaluated on the orientation-normalized state (White center
down, Yellow up, Green front) and are defined relative to center colors, so
they are invariant under whole-cube reorientation.  Stage membership:

    White Flower:  Side, Back, Maintain, Front Harder, Back Harder
    White Cross:   Match
    Four Corners:  Left Corner, Right Corner, Top Layer, Underneath, Mismatch

Daisy-stage patterns classify where the target white edge sticker sits:

    Side          equator band, middle row of a side face (8 placements)
    Back          facing straight down on the bottom layer (4)
    Front Harder  top layer, flipped so white faces sideways (4)
    Back Harder   bottom layer, white facing sideways (4)
    Maintain      any of the above whose direct insertion would displace an
                  already-placed petal, so an Up-layer setup turn is needed

Corner-stage patterns classify the target white corner:

    Left/Right Corner  in the top layer above its slot, white sideways
    Top Layer          in the top layer above its slot, white facing up
    Underneath         in a bottom slot, wrong slot or twisted
    Mismatch           in the top layer above a non-matching slot

Corner macros are the shortest face-turn words that place the target while
net-fixing the cross and the other three bottom corner slots (verified by
exhaustive search; two Underneath cases need 7 quarter turns, the rest 6 or
fewer).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import cube
from .cube import (
    CORNER_COLORS, CORNER_HOME, CORNER_SLOTS, Color, CubeState,
    EDGE_COLORS, EDGE_HOME, EDGE_SLOTS, Move,
    D2, F2, F6, F8, R4, U2, U4, U6, U8,
    normalize_orientation, parse_moves,
)
from .errors import PatternMismatch
from .solver import Stage

WHITE = Color.WHITE

_OPPOSITES = (
    frozenset((Color.WHITE, Color.YELLOW)),
    frozenset((Color.GREEN, Color.BLUE)),
    frozenset((Color.RED, Color.ORANGE)),
)


class KcId(Enum):
    SIDE = "side"
    BACK = "back"
    FRONT_HARDER = "front_harder"
    BACK_HARDER = "back_harder"
    MAINTAIN = "maintain"
    MATCH = "match"
    LEFT_CORNER = "left_corner"
    RIGHT_CORNER = "right_corner"
    TOP_LAYER = "top_layer"
    UNDERNEATH = "underneath"
    MISMATCH = "mismatch"


@dataclass(frozen=True)
class KnowledgeComponent:
    id: KcId
    stage: Stage
    difficulty: int
    order_index: int

    @property
    def title(self) -> str:
        return self.id.value.replace("_", " ").title()


# Display order: stages in sequence, difficulty ascending, figure order on ties.
_CATALOG_SPEC = (
    (KcId.SIDE, Stage.WHITE_FLOWER, 1),
    (KcId.BACK, Stage.WHITE_FLOWER, 2),
    (KcId.MAINTAIN, Stage.WHITE_FLOWER, 2),
    (KcId.FRONT_HARDER, Stage.WHITE_FLOWER, 3),
    (KcId.BACK_HARDER, Stage.WHITE_FLOWER, 3),
    (KcId.MATCH, Stage.WHITE_CROSS, 1),
    (KcId.LEFT_CORNER, Stage.FOUR_CORNERS, 2),
    (KcId.RIGHT_CORNER, Stage.FOUR_CORNERS, 2),
    (KcId.TOP_LAYER, Stage.FOUR_CORNERS, 3),
    (KcId.UNDERNEATH, Stage.FOUR_CORNERS, 3),
    (KcId.MISMATCH, Stage.FOUR_CORNERS, 4),
)

CATALOG = tuple(
    KnowledgeComponent(kc_id, stage, stars, i)
    for i, (kc_id, stage, stars) in enumerate(_CATALOG_SPEC)
)
KC_BY_ID = {kc.id: kc for kc in CATALOG}
# Tie-break order for simultaneous matches: the fixed id declaration order.
_ID_ORDER = {kc_id: i for i, kc_id in enumerate(KcId)}


def kc(kc_id: KcId) -> KnowledgeComponent:
    return KC_BY_ID[kc_id]


@dataclass(frozen=True)
class TargetPiece:
    """A white edge or corner identified by its color set; slot indexes the
    piece's current position in the normalized frame."""

    kind: str
    colors: frozenset
    slot: int

    def __post_init__(self):
        n = {"edge": 2, "corner": 3}.get(self.kind)
        if n is None:
            raise ValueError(f"bad piece kind {self.kind!r}")
        if len(self.colors) != n:
            raise ValueError(f"{self.kind} needs {n} distinct colors")
        for pair in _OPPOSITES:
            if pair <= self.colors:
                raise ValueError(f"impossible piece: opposite colors {set(pair)}")

    @property
    def key(self) -> tuple:
        return (self.kind, self.colors)


@dataclass(frozen=True)
class PatternTemplate:
    """One target-sticker placement satisfying a component's pattern: the
    facelet index of the target's white sticker in the normalized frame."""

    kc_id: KcId
    white_pos: int


# --- position tables -------------------------------------------------------------

PETAL_SLOTS = (U2, U4, U6, U8)
_PETAL_SET = frozenset(PETAL_SLOTS)

_Y_SRC = cube.src_table(cube.MOVES_BY_NOTATION["y"])
_Y_POS = [0] * 54
for _j, _i in enumerate(_Y_SRC):
    _Y_POS[_i] = _j
_Y_FACE = {"U": "U", "D": "D", "F": "L", "L": "B", "B": "R", "R": "F"}


def _rot_pos(pos: int, k: int) -> int:
    for _ in range(k % 4):
        pos = _Y_POS[pos]
    return pos


def _rot_face(letter: str, k: int) -> str:
    for _ in range(k % 4):
        letter = _Y_FACE[letter]
    return letter


def _rot_word(notation: str, k: int) -> tuple[str, ...]:
    out = []
    for tok in notation.split():
        out.append(_rot_face(tok[0], k) + tok[1:])
    return tuple(out)


# Daisy insertion bases in the front quadrant; phases are (moves, petal slots
# that the phase displaces and therefore must be free right before it runs).
_EDGE_BASES = (
    (KcId.SIDE, F6, ((("R",), (U6,)),)),
    (KcId.SIDE, R4, ((("F'",), (U8,)),)),
    (KcId.BACK, D2, ((("F2",), (U8,)),)),
    (KcId.FRONT_HARDER, F2, ((("F",), ()), (("R",), (U6,)))),
    (KcId.BACK_HARDER, F8, ((("F",), (U8,)), (("L'",), (U4,)))),
)

_EDGE_CASES: dict[int, tuple[KcId, tuple]] = {}
_EDGE_TEMPLATES: dict[KcId, list[int]] = {
    KcId.SIDE: [], KcId.BACK: [], KcId.FRONT_HARDER: [], KcId.BACK_HARDER: [],
}
for _kc_id, _white, _phases in _EDGE_BASES:
    for _k in range(4):
        pos = _rot_pos(_white, _k)
        phases = tuple(
            (_rot_word(" ".join(mv), _k), tuple(_rot_pos(s, _k) for s in slots))
            for mv, slots in _phases
        )
        _EDGE_CASES[pos] = (_kc_id, phases)
        _EDGE_TEMPLATES[_kc_id].append(pos)

INSERTABLE_WHITE = frozenset(_EDGE_CASES)

# Corner macro words for a piece at URF (top) or DFR (bottom); o is the index
# of the white sticker within the slot triple, j the number of y-rotations
# from the slot below (top cases) or the slot itself (bottom cases) to the
# piece's home.  Minimal under the cross/other-corner preservation constraints.
_TOP_WORDS = {
    (0, 0): "R F R' F' U' R'",
    (0, 1): "L' F' L' F U' L",
    (0, 2): "R U' L U R' L'",
    (0, 3): "B R B R' U B'",
    (1, 0): "R U R'",
    (1, 1): "L' U L",
    (1, 2): "U B' U B",
    (1, 3): "U' B U B'",
    (2, 0): "F' U' F",
    (2, 1): "U L' U' L",
    (2, 2): "U' L U' L'",
    (2, 3): "B U' B'",
}
_BOTTOM_WORDS = {
    (0, 1): "R U R' L' U' L",
    (0, 2): "R U' L U' R' L'",
    (0, 3): "F' U F B U' B'",
    (1, 0): "R U' R' F' U' F",
    (1, 1): "R U L' U R' U L",
    (1, 2): "F' U' F L U' L'",
    (1, 3): "F' B U' F B'",
    (2, 0): "F' U F R U R'",
    (2, 1): "R L' U R' L",
    (2, 2): "R U R' B' U B",
    (2, 3): "R U R' U R' U R",
}

_CORNER_POS = {
    pos: (slot, ori)
    for slot, triple in enumerate(CORNER_SLOTS)
    for ori, pos in enumerate(triple)
}
_EDGE_POS = {
    pos: (slot, ori)
    for slot, pair in enumerate(EDGE_SLOTS)
    for ori, pos in enumerate(pair)
}

_TEMPLATES: dict[KcId, tuple[PatternTemplate, ...]] = {}
for _kc_id in (KcId.SIDE, KcId.BACK, KcId.FRONT_HARDER, KcId.BACK_HARDER):
    _TEMPLATES[_kc_id] = tuple(PatternTemplate(_kc_id, p) for p in _EDGE_TEMPLATES[_kc_id])
_TEMPLATES[KcId.MAINTAIN] = tuple(PatternTemplate(KcId.MAINTAIN, p) for p in _EDGE_CASES)
_TEMPLATES[KcId.MATCH] = tuple(PatternTemplate(KcId.MATCH, _rot_pos(U8, k)) for k in range(4))
_TEMPLATES[KcId.TOP_LAYER] = tuple(PatternTemplate(KcId.TOP_LAYER, CORNER_SLOTS[s][0]) for s in range(4))
_TEMPLATES[KcId.RIGHT_CORNER] = tuple(PatternTemplate(KcId.RIGHT_CORNER, CORNER_SLOTS[s][1]) for s in range(4))
_TEMPLATES[KcId.LEFT_CORNER] = tuple(PatternTemplate(KcId.LEFT_CORNER, CORNER_SLOTS[s][2]) for s in range(4))
_TEMPLATES[KcId.MISMATCH] = tuple(
    PatternTemplate(KcId.MISMATCH, p) for s in range(4) for p in CORNER_SLOTS[s]
)
_TEMPLATES[KcId.UNDERNEATH] = tuple(
    PatternTemplate(KcId.UNDERNEATH, p) for s in range(4, 8) for p in CORNER_SLOTS[s]
)


def kc_pattern_positions(component: KnowledgeComponent | KcId) -> list[PatternTemplate]:
    kc_id = component.id if isinstance(component, KnowledgeComponent) else component
    return list(_TEMPLATES[kc_id])


# --- piece lookup ------------------------------------------------------------------

def edge_piece_at(state: CubeState, slot: int) -> TargetPiece:
    a, b = EDGE_SLOTS[slot]
    return TargetPiece("edge", frozenset((state.color(a), state.color(b))), slot)


def corner_piece_at(state: CubeState, slot: int) -> TargetPiece:
    triple = CORNER_SLOTS[slot]
    return TargetPiece("corner", frozenset(state.color(p) for p in triple), slot)


def find_piece(state: CubeState, kind: str, colors: frozenset) -> TargetPiece:
    slots = EDGE_SLOTS if kind == "edge" else CORNER_SLOTS
    for slot, group in enumerate(slots):
        if frozenset(state.color(p) for p in group) == colors:
            return TargetPiece(kind, colors, slot)
    raise PatternMismatch(f"no {kind} with colors {sorted(c.name for c in colors)}")


def white_edges(state: CubeState) -> list[TargetPiece]:
    return [edge_piece_at(state, s) for s in range(12)
            if WHITE in {state.color(p) for p in EDGE_SLOTS[s]}]


def white_corners(state: CubeState) -> list[TargetPiece]:
    return [corner_piece_at(state, s) for s in range(8)
            if WHITE in {state.color(p) for p in CORNER_SLOTS[s]}]


def white_pos_of_edge(state: CubeState, slot: int) -> int:
    a, b = EDGE_SLOTS[slot]
    return a if state.color(a) is WHITE else b


def white_pos_of_corner(state: CubeState, slot: int) -> int:
    for p in CORNER_SLOTS[slot]:
        if state.color(p) is WHITE:
            return p
    raise PatternMismatch("corner has no white sticker")


def is_petal(state: CubeState, piece: TargetPiece) -> bool:
    slot = find_piece(state, "edge", piece.colors).slot
    return white_pos_of_edge(state, slot) in _PETAL_SET


def edge_placed(state: CubeState, slot: int) -> bool:
    a, b = EDGE_SLOTS[slot]
    home = EDGE_HOME[frozenset((state.color(a), state.color(b)))]
    return slot == home and state.color(a) == EDGE_COLORS[home][0]


def corner_placed(state: CubeState, slot: int) -> bool:
    cols = tuple(state.color(p) for p in CORNER_SLOTS[slot])
    home = CORNER_HOME[frozenset(cols)]
    return slot == home and cols[0] == CORNER_COLORS[home][0]


def unplaced_white_edges(state: CubeState) -> list[TargetPiece]:
    return [p for p in white_edges(state) if not edge_placed(state, p.slot)]


def unplaced_white_corners(state: CubeState) -> list[TargetPiece]:
    return [p for p in white_corners(state) if not corner_placed(state, p.slot)]


# --- pattern classification ---------------------------------------------------------

def _phase_conflicts(state: CubeState, phases) -> bool:
    """True if any displaced petal slot already holds a petal, evaluated
    statically (daisy phase moves never add white to a later phase's slots)."""
    s = state.stickers
    return any(s[slot] == WHITE for _, slots in phases for slot in slots)


def classify_edge(state: CubeState, slot: int) -> KcId | None:
    """Knowledge component matching the white edge at `slot`, if any."""
    if edge_placed(state, slot):
        return None
    w = white_pos_of_edge(state, slot)
    if w in _PETAL_SET:
        return KcId.MATCH
    base_kc, phases = _EDGE_CASES[w]
    if _phase_conflicts(state, phases):
        return KcId.MAINTAIN
    return base_kc


def _corner_offset(state: CubeState, slot: int) -> tuple[int, int]:
    """(orientation, y-offset from the reference slot to the piece's home)."""
    cols = tuple(state.color(p) for p in CORNER_SLOTS[slot])
    home = CORNER_HOME[frozenset(cols)]
    ori = cols.index(WHITE)
    ref = slot + 4 if slot < 4 else slot
    return ori, (home - ref) % 4


def classify_corner(state: CubeState, slot: int) -> KcId | None:
    ori, j = _corner_offset(state, slot)
    if slot >= 4:
        return None if (ori == 0 and j == 0) else KcId.UNDERNEATH
    if j != 0:
        return KcId.MISMATCH
    return (KcId.TOP_LAYER, KcId.RIGHT_CORNER, KcId.LEFT_CORNER)[ori]


def match_kc(state: CubeState) -> list[tuple[KnowledgeComponent, TargetPiece]]:
    """All (component, piece) pairs whose pattern holds, hardest first."""
    normalized, _ = normalize_orientation(state)
    pairs = []
    for piece in white_edges(normalized):
        kc_id = classify_edge(normalized, piece.slot)
        if kc_id is not None:
            pairs.append((KC_BY_ID[kc_id], piece))
    for piece in white_corners(normalized):
        kc_id = classify_corner(normalized, piece.slot)
        if kc_id is not None:
            pairs.append((KC_BY_ID[kc_id], piece))
    pairs.sort(key=lambda m: (-m[0].difficulty, _ID_ORDER[m[0].id]))
    return pairs


def pattern_holds(component: KnowledgeComponent, piece: TargetPiece, state: CubeState) -> bool:
    normalized, _ = normalize_orientation(state)
    try:
        located = find_piece(normalized, piece.kind, piece.colors)
    except PatternMismatch:
        return False
    if piece.kind == "edge":
        return classify_edge(normalized, located.slot) is component.id
    return classify_corner(normalized, located.slot) is component.id


def goal_met(component: KnowledgeComponent, piece: TargetPiece, state: CubeState) -> bool:
    """Daisy components: the target's white sticker is on the Up face.
    Match and all corner components: the target sits solved in its home slot."""
    normalized, _ = normalize_orientation(state)
    located = find_piece(normalized, piece.kind, piece.colors)
    if component.stage is Stage.WHITE_FLOWER:
        return white_pos_of_edge(normalized, located.slot) in _PETAL_SET
    if piece.kind == "edge":
        return edge_placed(normalized, located.slot)
    return corner_placed(normalized, located.slot)


# --- canonical macros ----------------------------------------------------------------

_U_SETUPS = ((), ("U",), ("U'",), ("U2",))


def _u_setup_freeing(state: CubeState, slots) -> tuple[str, ...] | None:
    for setup in _U_SETUPS:
        sim = state.apply_all(parse_moves(" ".join(setup))) if setup else state
        if all(sim.color(p) is not WHITE for p in slots):
            return setup
    return None


def _edge_macro(kc_id: KcId, state: CubeState, slot: int) -> list[str]:
    w = white_pos_of_edge(state, slot)
    if w not in _EDGE_CASES:
        raise PatternMismatch(f"white sticker at {w} is not insertable")
    base_kc, phases = _EDGE_CASES[w]
    expect = KcId.MAINTAIN if _phase_conflicts(state, phases) else base_kc
    if kc_id is not expect:
        raise PatternMismatch(f"piece matches {expect.value}, not {kc_id.value}")
    word: list[str] = []
    current = state
    for moves, slots in phases:
        setup = _u_setup_freeing(current, slots)
        if setup is None:
            raise PatternMismatch("no Up-layer setup frees the insertion path")
        word.extend(setup)
        word.extend(moves)
        current = current.apply_all(parse_moves(" ".join(setup + moves)))
    return word


def _match_macro(state: CubeState, slot: int) -> list[str]:
    piece = edge_piece_at(state, slot)
    for setup in _U_SETUPS:
        sim = state.apply_all(parse_moves(" ".join(setup))) if setup else state
        where = find_piece(sim, "edge", piece.colors).slot
        side_pos = EDGE_SLOTS[where][1]
        face = side_pos // 9
        if sim.color(side_pos) == sim.center(cube.Face(face)):
            return list(setup) + [cube.Face(face).name + "2"]
    raise PatternMismatch("petal side color matches no side center")


def _corner_macro(kc_id: KcId, state: CubeState, slot: int) -> list[str]:
    ori, j = _corner_offset(state, slot)
    if slot < 4:
        word, k = _TOP_WORDS.get((ori, j)), slot
    else:
        word, k = _BOTTOM_WORDS.get((ori, j)), slot - 4
    if word is None:
        raise PatternMismatch("corner is already placed")
    return list(_rot_word(word, k))


def canonical_macro(component: KnowledgeComponent | KcId, piece: TargetPiece,
                    state: CubeState) -> list[Move]:
    """The canonical solution word for (component, piece) on `state`, returned
    in the frame of `state` as passed (face letters translated back through
    the normalizing reorientation)."""
    from .solver import _translate_to_frame

    comp = component if isinstance(component, KnowledgeComponent) else KC_BY_ID[component]
    normalized, _ = normalize_orientation(state)
    located = find_piece(normalized, piece.kind, piece.colors)
    if piece.kind == "edge":
        if comp.id is KcId.MATCH:
            if classify_edge(normalized, located.slot) is not KcId.MATCH:
                raise PatternMismatch("target is not a daisy petal")
            word = _match_macro(normalized, located.slot)
        else:
            word = _edge_macro(comp.id, normalized, located.slot)
    else:
        if classify_corner(normalized, located.slot) is not comp.id:
            raise PatternMismatch(f"corner does not match {comp.id.value}")
        word = _corner_macro(comp.id, normalized, located.slot)
    return _translate_to_frame(parse_moves(" ".join(word)), state)


def piece_positions(state: CubeState, piece: TargetPiece) -> tuple[int, ...]:
    """Current facelet positions of the piece's stickers (normalized frame)."""
    normalized, _ = normalize_orientation(state)
    located = find_piece(normalized, piece.kind, piece.colors)
    slots = EDGE_SLOTS if piece.kind == "edge" else CORNER_SLOTS
    return slots[located.slot]


def template_macro_notation(template: PatternTemplate) -> str:
    """The fixed insertion word for a template in face-turn notation.  Up-layer
    setup turns are state-dependent and prepended at runtime (Maintain, Match
    alignment), so they are not part of the static word."""
    kc_id = template.kc_id
    if kc_id is KcId.MATCH:
        slot, _ = _EDGE_POS[template.white_pos]
        face = EDGE_SLOTS[slot][1] // 9
        return cube.Face(face).name + "2"
    if kc_id in (KcId.SIDE, KcId.BACK, KcId.FRONT_HARDER, KcId.BACK_HARDER,
                 KcId.MAINTAIN):
        _, phases = _EDGE_CASES[template.white_pos]
        return " ".join(m for moves, _ in phases for m in moves)
    slot, ori = _CORNER_POS[template.white_pos]
    if slot < 4:
        # Mismatch depends on the piece's home; the adjacent-slot word is the
        # representative
        offset = 1 if kc_id is KcId.MISMATCH else 0
        return " ".join(_rot_word(_TOP_WORDS[(ori, offset)], slot))
    representative = {0: (0, 1), 1: (1, 0), 2: (2, 0)}[ori]
    return " ".join(_rot_word(_BOTTOM_WORDS[representative], slot - 4))


def catalog_records() -> list[dict]:
    """KC catalog as JSON-ready records: the shared source of truth for the
    UI, the wire protocol history, and the tests."""
    records = []
    for component in CATALOG:
        records.append({
            "id": component.id.value,
            "title": component.title,
            "stage": component.stage.name.lower(),
            "difficulty": component.difficulty,
            "templates": [t.white_pos for t in _TEMPLATES[component.id]],
            "macros": [template_macro_notation(t) for t in _TEMPLATES[component.id]],
        })
    return records
