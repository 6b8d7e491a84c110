"""Facelet cube model: moves, serialization, orientation, legality, scrambling.

Facelet layout (faces U, R, F, D, L, B; each face row-major as viewed head-on
with the Up face toward the top; B is viewed from behind, Up still on top):

                |************|
                |*U1**U2**U3*|
                |*U4**U5**U6*|
                |*U7**U8**U9*|
    ************|************|************|************
    *L1**L2**L3*|*F1**F2**F3*|*R1**R2**R3*|*B1**B2**B3*
    *L4**L5**L6*|*F4**F5**F6*|*R4**R5**R6*|*B4**B5**B6*
    *L7**L8**L9*|*F7**F8**F9*|*R7**R8**R9*|*B7**B8**B9*
    ************|************|************|************
                |*D1**D2**D3*|
                |*D4**D5**D6*|
                |*D7**D8**D9*|

Sticker index = 9 * face + 3 * row + col.  Serialization is the 54-character
string over WYGBRO in this index order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum
from functools import reduce

from .errors import BadColorCount, BadLength, BadSymbol, CenterConflict


class Color(IntEnum):
    WHITE = 0
    YELLOW = 1
    GREEN = 2
    BLUE = 3
    RED = 4
    ORANGE = 5


class Face(IntEnum):
    U = 0
    R = 1
    F = 2
    D = 3
    L = 4
    B = 5


COLOR_LETTERS = "WYGBRO"
_COLOR_OF_LETTER = {c: Color(i) for i, c in enumerate(COLOR_LETTERS)}

# Western color scheme of the solved cube: U white, R red, F green,
# D yellow, L orange, B blue.
SOLVED_FACE_COLORS = (
    Color.WHITE, Color.RED, Color.GREEN, Color.YELLOW, Color.ORANGE, Color.BLUE,
)

# Facelet index constants, U1..B9.
U1, U2, U3, U4, U5, U6, U7, U8, U9 = range(0, 9)
R1, R2, R3, R4, R5, R6, R7, R8, R9 = range(9, 18)
F1, F2, F3, F4, F5, F6, F7, F8, F9 = range(18, 27)
D1, D2, D3, D4, D5, D6, D7, D8, D9 = range(27, 36)
L1, L2, L3, L4, L5, L6, L7, L8, L9 = range(36, 45)
B1, B2, B3, B4, B5, B6, B7, B8, B9 = range(45, 54)

CW90 = 1
CCW90 = -1
HALF = 2
_AMOUNT_SUFFIX = {CW90: "", CCW90: "'", HALF: "2"}

FACE_LETTERS = "URFDLB"
AXIS_LETTERS = "xyz"


@dataclass(frozen=True)
class Move:
    """One face turn ("face") or whole-cube reorientation ("reorient")."""

    kind: str
    target: str
    amount: int

    def __post_init__(self):
        if self.kind == "face":
            if self.target not in FACE_LETTERS:
                raise ValueError(f"bad face {self.target!r}")
        elif self.kind == "reorient":
            if self.target not in AXIS_LETTERS:
                raise ValueError(f"bad axis {self.target!r}")
        else:
            raise ValueError(f"bad move kind {self.kind!r}")
        if self.amount not in (CW90, CCW90, HALF):
            raise ValueError(f"bad amount {self.amount!r}")

    @property
    def notation(self) -> str:
        return self.target + _AMOUNT_SUFFIX[self.amount]

    @property
    def is_face_turn(self) -> bool:
        return self.kind == "face"

    @property
    def quarter_turns(self) -> int:
        """Cost in the quarter-turn metric; reorientations are free."""
        if self.kind == "reorient":
            return 0
        return 2 if self.amount == HALF else 1

    def inverse(self) -> Move:
        if self.amount == HALF:
            return self
        return Move(self.kind, self.target, -self.amount)

    def __str__(self) -> str:
        return self.notation


def parse_move(notation: str) -> Move:
    base, suffix = notation[:1], notation[1:]
    amount = {"": CW90, "'": CCW90, "2": HALF}.get(suffix)
    if amount is None:
        raise ValueError(f"bad move notation {notation!r}")
    kind = "face" if base in FACE_LETTERS else "reorient"
    return Move(kind, base, amount)


def inverse(move: Move) -> Move:
    return move.inverse()


# --- permutation tables, derived from facelet geometry -----------------------
#
# Coordinates: x toward R, y toward U, z toward F; facelet centers use doubled
# integer coordinates (in-plane -2/0/2, normal +-3).  A clockwise face turn,
# viewed from outside the face, is a -90 degree rotation about the outward
# normal; reorientations x/y/z follow R/U/F turn directions.

_FRAMES = {
    "U": ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    "R": ((1, 0, 0), (0, -1, 0), (0, 0, -1)),
    "F": ((0, 0, 1), (0, -1, 0), (1, 0, 0)),
    "D": ((0, -1, 0), (0, 0, -1), (1, 0, 0)),
    "L": ((-1, 0, 0), (0, -1, 0), (0, 0, 1)),
    "B": ((0, 0, -1), (0, -1, 0), (-1, 0, 0)),
}

_ROT = {
    "x": lambda v: (v[0], -v[2], v[1]),
    "y": lambda v: (v[2], v[1], -v[0]),
    "z": lambda v: (-v[1], v[0], v[2]),
}
_FACE_AXIS = {"U": ("y", -1), "D": ("y", 1), "R": ("x", -1),
              "L": ("x", 1), "F": ("z", -1), "B": ("z", 1)}
_FACE_LAYER = {"U": (1, 1), "D": (1, -1), "R": (0, 1),
               "L": (0, -1), "F": (2, 1), "B": (2, -1)}


def _geometry():
    pos, nrm = [], []
    for f in FACE_LETTERS:
        n, r, c = _FRAMES[f]
        for row in range(3):
            for col in range(3):
                pos.append(tuple(3 * n[i] + 2 * (row - 1) * r[i] + 2 * (col - 1) * c[i]
                                 for i in range(3)))
                nrm.append(n)
    return pos, nrm


_POS, _NRM = _geometry()
_GEO_INDEX = {(p, n): i for i, (p, n) in enumerate(zip(_POS, _NRM))}


def _src_table(axis: str, quarter_turns: int, layer=None) -> tuple[int, ...]:
    """new[j] = old[src[j]] for the rotation restricted to `layer`."""
    rot = _ROT[axis]
    src = list(range(54))
    for i in range(54):
        p, n = _POS[i], _NRM[i]
        if layer is not None:
            coord, sign = layer
            if p[coord] * sign < 1:
                continue
        for _ in range(quarter_turns % 4):
            p, n = rot(p), rot(n)
        src[_GEO_INDEX[(p, n)]] = i
    return tuple(src)


def _build_tables() -> dict[str, tuple[int, ...]]:
    tables = {}
    for f in FACE_LETTERS:
        axis, sign = _FACE_AXIS[f]
        layer = _FACE_LAYER[f]
        for amount in (CW90, CCW90, HALF):
            qt = 2 if amount == HALF else (sign * amount) % 4
            tables[f + _AMOUNT_SUFFIX[amount]] = _src_table(axis, qt, layer)
    for a in AXIS_LETTERS:
        for amount in (CW90, CCW90, HALF):
            qt = 2 if amount == HALF else (-amount) % 4
            tables[a + _AMOUNT_SUFFIX[amount]] = _src_table(a, qt)
    return tables


_SRC = _build_tables()

ALL_MOVES = tuple(parse_move(n) for n in _SRC)
FACE_TURNS = tuple(m for m in ALL_MOVES if m.is_face_turn)
QUARTER_TURNS = tuple(m for m in FACE_TURNS if m.amount != HALF)
REORIENTS = tuple(m for m in ALL_MOVES if not m.is_face_turn)
MOVES_BY_NOTATION = {m.notation: m for m in ALL_MOVES}


def src_table(move: Move) -> tuple[int, ...]:
    return _SRC[move.notation]


def parse_moves(text: str) -> list[Move]:
    """Parse a space-separated move sequence like "R U R'"."""
    return [parse_move(tok) for tok in text.split()]


def compose_src(moves) -> tuple[int, ...]:
    """Source table of a move sequence: applying the sequence to `state`
    yields stickers[j] = state.stickers[src[j]]."""
    src = tuple(range(54))
    for move in moves:
        step = _SRC[move.notation]
        src = tuple(src[step[j]] for j in range(54))
    return src


def format_moves(moves) -> str:
    return " ".join(m.notation for m in moves)


# --- cube state ---------------------------------------------------------------

@dataclass(frozen=True)
class CubeState:
    """Immutable 54-sticker state; `stickers[i]` is the Color at facelet i."""

    stickers: bytes

    def __post_init__(self):
        if len(self.stickers) != 54:
            raise BadLength(f"expected 54 stickers, got {len(self.stickers)}")

    def apply(self, move: Move) -> CubeState:
        src = _SRC[move.notation]
        s = self.stickers
        return CubeState(bytes(s[i] for i in src))

    def apply_all(self, moves) -> CubeState:
        return reduce(CubeState.apply, moves, self)

    def color(self, index: int) -> Color:
        return Color(self.stickers[index])

    def center(self, face: Face) -> Color:
        return Color(self.stickers[9 * face + 4])

    def centers(self) -> tuple[Color, ...]:
        return tuple(Color(self.stickers[9 * f + 4]) for f in range(6))

    def counts(self) -> list[int]:
        counts = [0] * 6
        for c in self.stickers:
            counts[c] += 1
        return counts

    def __str__(self) -> str:
        return serialize(self)


SOLVED = CubeState(bytes(int(SOLVED_FACE_COLORS[i // 9]) for i in range(54)))


def apply_move(state: CubeState, move: Move) -> CubeState:
    return state.apply(move)


def serialize(state: CubeState) -> str:
    return "".join(COLOR_LETTERS[c] for c in state.stickers)


def parse(facelets: str) -> CubeState:
    if len(facelets) != 54:
        raise BadLength(f"expected 54 characters, got {len(facelets)}")
    try:
        stickers = bytes(_COLOR_OF_LETTER[ch] for ch in facelets)
    except KeyError as err:
        raise BadSymbol(f"unknown facelet symbol {err.args[0]!r}") from None
    state = CubeState(stickers)
    if state.counts() != [9] * 6:
        raise BadColorCount(f"color counts {state.counts()} != nine of each")
    return state


StickerMask = frozenset


def masked_equal(a: CubeState, b: CubeState, mask: StickerMask) -> bool:
    return all(a.stickers[i] == b.stickers[i] for i in mask)


# --- orientation --------------------------------------------------------------

def _rotation_group():
    """The 24 cube rotations as (src table, shortest reorient word)."""
    identity = tuple(range(54))
    seen = {identity: ()}
    frontier = [identity]
    gens = [(m, _SRC[m.notation]) for m in REORIENTS]
    while frontier:
        nxt = []
        for perm in frontier:
            word = seen[perm]
            for move, src in gens:
                child = tuple(perm[i] for i in src)
                if child not in seen:
                    seen[child] = word + (move,)
                    nxt.append(child)
        frontier = nxt
    assert len(seen) == 24
    return sorted(seen.items(), key=lambda kv: (len(kv[1]), [m.notation for m in kv[1]]))


_ROTATIONS = _rotation_group()


def normalize_orientation(state: CubeState) -> tuple[CubeState, list[Move]]:
    """Reorient so the White center is on Down and the Green center on Front.

    Returns the normalized state and the reorientation sequence applied.
    Raises CenterConflict unless the six centers are pairwise distinct.
    """
    centers = state.centers()
    if len(set(centers)) != 6:
        raise CenterConflict(f"centers {centers} are not six distinct colors")
    for src, word in _ROTATIONS:
        s = state.stickers
        if s[src[D5]] == Color.WHITE and s[src[F5]] == Color.GREEN:
            if not word:
                return state, []
            return CubeState(bytes(s[i] for i in src)), list(word)
    raise CenterConflict(f"no orientation puts White down / Green front: {centers}")


NORMALIZED_SOLVED = normalize_orientation(SOLVED)[0]


# --- cubie view and legality ---------------------------------------------------
#
# Slot facelet tuples; corners are listed clockwise from outside starting with
# the U/D facelet, edges start with their U/D (or F/B for equator) facelet.

CORNER_SLOTS = (
    (8, 9, 20),    # URF
    (6, 18, 38),   # UFL
    (0, 36, 47),   # ULB
    (2, 45, 11),   # UBR
    (29, 26, 15),  # DFR
    (27, 44, 24),  # DLF
    (33, 53, 42),  # DBL
    (35, 17, 51),  # DRB
)
CORNER_NAMES = ("URF", "UFL", "ULB", "UBR", "DFR", "DLF", "DBL", "DRB")

EDGE_SLOTS = (
    (5, 10),   # UR
    (7, 19),   # UF
    (3, 37),   # UL
    (1, 46),   # UB
    (32, 16),  # DR
    (28, 25),  # DF
    (30, 43),  # DL
    (34, 52),  # DB
    (23, 12),  # FR
    (21, 41),  # FL
    (50, 39),  # BL
    (48, 14),  # BR
)
EDGE_NAMES = ("UR", "UF", "UL", "UB", "DR", "DF", "DL", "DB", "FR", "FL", "BL", "BR")

# Solved piece colors in the normalized frame (White down, Green front).
_N = NORMALIZED_SOLVED.stickers
CORNER_COLORS = tuple(tuple(Color(_N[p]) for p in slot) for slot in CORNER_SLOTS)
EDGE_COLORS = tuple(tuple(Color(_N[p]) for p in slot) for slot in EDGE_SLOTS)
CORNER_HOME = {frozenset(cols): i for i, cols in enumerate(CORNER_COLORS)}
EDGE_HOME = {frozenset(cols): i for i, cols in enumerate(EDGE_COLORS)}


def decompose(state: CubeState):
    """Cubie view of a normalized state.

    Returns (corner_perm, corner_ori, edge_perm, edge_ori) where perm[slot] is
    the home slot of the piece sitting there, or None if any sticker group is
    not a real piece.  Corner ori is the index of the U/D-axis color within the
    slot triple; edge ori is 0 when the piece's primary color sits on the
    slot's primary facelet.
    """
    s = state.stickers
    corner_perm, corner_ori = [], []
    for slot in CORNER_SLOTS:
        cols = tuple(Color(s[p]) for p in slot)
        home = CORNER_HOME.get(frozenset(cols))
        if home is None:
            return None
        ud = CORNER_COLORS[home][0]
        ori = cols.index(ud)
        if tuple(cols[(ori + k) % 3] for k in range(3)) != CORNER_COLORS[home]:
            return None  # mirror image, impossible as a physical piece
        corner_perm.append(home)
        corner_ori.append(ori)
    edge_perm, edge_ori = [], []
    for slot in EDGE_SLOTS:
        cols = tuple(Color(s[p]) for p in slot)
        home = EDGE_HOME.get(frozenset(cols))
        if home is None:
            return None
        edge_perm.append(home)
        edge_ori.append(0 if cols[0] == EDGE_COLORS[home][0] else 1)
    if sorted(corner_perm) != list(range(8)) or sorted(edge_perm) != list(range(12)):
        return None
    return corner_perm, corner_ori, edge_perm, edge_ori


def _parity(perm) -> int:
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def is_legal(state: CubeState) -> bool:
    """True iff the state is reachable from solved by face turns (up to
    whole-cube reorientation): valid pieces, twist sum 0 mod 3, flip sum
    0 mod 2, and equal corner/edge permutation parity."""
    if state.counts() != [9] * 6:
        return False
    if len(set(state.centers())) != 6:
        return False
    try:
        normalized, _ = normalize_orientation(state)
    except CenterConflict:
        return False
    if normalized.centers() != NORMALIZED_SOLVED.centers():
        return False
    cubies = decompose(normalized)
    if cubies is None:
        return False
    corner_perm, corner_ori, edge_perm, edge_ori = cubies
    if sum(corner_ori) % 3 != 0:
        return False
    if sum(edge_ori) % 2 != 0:
        return False
    return _parity(corner_perm) == _parity(edge_perm)


# --- scrambling ----------------------------------------------------------------

def scramble(rng_seed: int, n_moves: int = 25) -> tuple[CubeState, list[Move]]:
    """Deterministic scramble: face turns avoiding same-face repeats."""
    rng = random.Random(rng_seed)
    moves: list[Move] = []
    prev_face = None
    for _ in range(n_moves):
        face = rng.choice([f for f in FACE_LETTERS if f != prev_face])
        amount = rng.choice((CW90, CCW90, HALF))
        moves.append(Move("face", face, amount))
        prev_face = face
    return SOLVED.apply_all(moves), moves
