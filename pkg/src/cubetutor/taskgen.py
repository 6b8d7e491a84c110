"""Targeted task generation: legal cube configurations matching a chosen
knowledge component, with randomized color arrangements.

Construction places the target piece at a uniformly chosen pattern template,
pins any already-placed structure from the stage context, scatters the
remaining pieces randomly, and then repairs legality on non-white pieces only
(one edge swap for permutation parity, one edge flip for the flip sum, one
corner twist for the twist sum).  Every emitted state is verified with the
legality check and the pattern matcher; generation is deterministic in the
seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import cube, task_model
from .cube import (
    CORNER_COLORS, CORNER_HOME, CORNER_SLOTS, CubeState, EDGE_COLORS,
    EDGE_HOME, EDGE_SLOTS, NORMALIZED_SOLVED, normalize_orientation,
)
from .errors import UnsatisfiableContext
from .solver import Stage
from .task_model import (
    CATALOG, KC_BY_ID, KcId, PatternTemplate, TargetPiece,
    _CORNER_POS, _EDGE_CASES, _EDGE_POS, kc_pattern_positions,
)
from .tracing import skillometer

_WHITE = cube.Color.WHITE
_WHITE_EDGE_HOMES = tuple(h for h in range(12) if _WHITE in EDGE_COLORS[h])
_WHITE_CORNER_HOMES = tuple(h for h in range(8) if _WHITE in CORNER_COLORS[h])
_PETAL_UP_SLOTS = (0, 1, 2, 3)  # UR, UF, UL, UB


@dataclass(frozen=True)
class GeneratedTask:
    kc_id: KcId
    state: CubeState
    piece: TargetPiece
    template_index: int
    seed: int


def pick_next_kc(rows, mode: str = "practice") -> KcId | None:
    """The first unmastered component in catalog order (earliest incomplete
    stage, lowest difficulty, figure order on ties); None when all mastered."""
    if isinstance(rows, dict):
        rows = skillometer(rows)
    by_id = {row.kc_id: row for row in rows}
    for component in CATALOG:
        row = by_id.get(component.id)
        if row is None or not row.mastered:
            return component.id
    return None


def generate_task(kc_id: KcId, rng_seed: int,
                  stage_context: CubeState | None = None) -> GeneratedTask:
    """A legal configuration matching `kc_id` at a random template.

    With a stage context, all placed structure (placed cross edges, petals,
    placed corners) other than the chosen target piece is reproduced
    unchanged.  Raises UnsatisfiableContext when the context leaves no
    template or no target piece for the component.
    """
    component = KC_BY_ID[kc_id]
    rng = random.Random(rng_seed)
    context = normalize_orientation(stage_context)[0] if stage_context is not None else None
    pinned = _pinned_map(context) if context is not None else {}
    templates = kc_pattern_positions(component)
    feasible = [i for i in range(len(templates))
                if _template_feasible(component, templates[i], pinned)]
    if not feasible:
        raise UnsatisfiableContext(
            f"context leaves no usable template for {kc_id.value}")
    last_error = "no candidate target piece"
    for _ in range(32):
        index = rng.choice(feasible)
        built = _instantiate(component, templates[index], rng, pinned)
        if built is None:
            continue
        state, piece = built
        if not cube.is_legal(state):
            last_error = "construction produced an unreachable state"
            continue
        matched = any(c.id is kc_id and p.key == piece.key
                      for c, p in task_model.match_kc(state))
        if matched and not task_model.goal_met(component, piece, state):
            return GeneratedTask(kc_id, state, piece, index, rng_seed)
        last_error = "pattern verification failed"
    raise UnsatisfiableContext(
        f"could not generate {kc_id.value} task: {last_error}")


def instantiate_template(kc_id: KcId, template: PatternTemplate,
                         rng_seed: int) -> tuple[CubeState, TargetPiece]:
    """Deterministic context-free instantiation of one template (test hook)."""
    rng = random.Random(rng_seed)
    for _ in range(32):
        built = _instantiate(KC_BY_ID[kc_id], template, rng, {})
        if built is None or not cube.is_legal(built[0]):
            continue
        state, piece = built
        if any(c.id is kc_id and p.key == piece.key
               for c, p in task_model.match_kc(state)):
            return built
    raise UnsatisfiableContext(f"template {template} failed to instantiate")


# --- construction ------------------------------------------------------------------

def _pinned_map(context: CubeState) -> dict:
    """Placed structure to reproduce: piece key -> (slot, ori)."""
    pinned = {}
    for piece in task_model.white_edges(context):
        a, b = EDGE_SLOTS[piece.slot]
        ori = 0 if context.color(a) is _WHITE else 1
        if task_model.edge_placed(context, piece.slot) or task_model.is_petal(context, piece):
            pinned[piece.key] = (piece.slot, ori)
    for piece in task_model.white_corners(context):
        if task_model.corner_placed(context, piece.slot):
            pinned[piece.key] = (piece.slot, 0)
    return pinned


def _required_free(template: PatternTemplate) -> tuple[int, ...]:
    """Petal positions that must not hold white for the direct insertion."""
    if template.kc_id in (KcId.SIDE, KcId.BACK, KcId.FRONT_HARDER, KcId.BACK_HARDER):
        _, phases = _EDGE_CASES[template.white_pos]
        return tuple(s for _, slots in phases for s in slots)
    return ()


def _conflict_positions(template: PatternTemplate) -> tuple[int, ...]:
    _, phases = _EDGE_CASES[template.white_pos]
    return tuple(s for _, slots in phases for s in slots)


def _pinned_white_positions(pinned: dict) -> set[int]:
    out = set()
    for (kind, _), (slot, ori) in pinned.items():
        if kind == "edge":
            out.add(EDGE_SLOTS[slot][ori])
    return out


def _template_feasible(component, template: PatternTemplate, pinned: dict) -> bool:
    pinned_slots = {slot for (kind, _), (slot, _) in pinned.items() if kind == "edge"}
    pinned_corner_slots = {slot for (kind, _), (slot, _) in pinned.items() if kind == "corner"}
    edge_targets = [h for h in _WHITE_EDGE_HOMES
                    if ("edge", frozenset(EDGE_COLORS[h])) not in pinned]
    corner_targets = [h for h in _WHITE_CORNER_HOMES
                      if ("corner", frozenset(CORNER_COLORS[h])) not in pinned]
    if component.stage is Stage.WHITE_FLOWER:
        if not edge_targets:
            return False
        slot, _ = _EDGE_POS[template.white_pos]
        if slot in pinned_slots:
            return False
        whites_up = _pinned_white_positions(pinned)
        if component.id is KcId.MAINTAIN:
            spare = len(edge_targets) >= 2
            return spare or any(p in whites_up for p in _conflict_positions(template))
        return not any(p in whites_up for p in _required_free(template))
    if component.id is KcId.MATCH:
        slot, _ = _EDGE_POS[template.white_pos]
        occupant = next((key for key, (s, _) in pinned.items() if key[0] == "edge" and s == slot), None)
        if occupant is not None:
            return True  # that petal itself becomes the target
        return bool(edge_targets)
    # corner components
    slot, _ = _CORNER_POS[template.white_pos]
    if slot in pinned_corner_slots:
        return False
    return bool(corner_targets)


def _instantiate(component, template: PatternTemplate, rng: random.Random,
                 pinned: dict):
    """One randomized construction; None when a random choice dead-ends."""
    edge_map: dict[int, tuple[int, int]] = {}
    corner_map: dict[int, tuple[int, int]] = {}
    for (kind, colors), (slot, ori) in pinned.items():
        home = (EDGE_HOME if kind == "edge" else CORNER_HOME)[colors]
        (edge_map if kind == "edge" else corner_map)[home] = (slot, ori)

    forbidden: set[int] = set()
    if component.stage in (Stage.WHITE_FLOWER, Stage.WHITE_CROSS):
        piece = _place_edge_target(component, template, rng, edge_map, forbidden)
    else:
        piece = _place_corner_target(component, template, rng, corner_map)
        for home in _WHITE_EDGE_HOMES:  # corners practice on a finished cross
            edge_map.setdefault(home, (home, 0))
    if piece is None:
        return None
    _scatter(rng, edge_map, corner_map, forbidden)
    _repair(edge_map, corner_map)
    state = _assemble(edge_map, corner_map)
    return state, piece


def _place_edge_target(component, template, rng, edge_map, forbidden):
    slot, ori = _EDGE_POS[template.white_pos]
    occupant = next((h for h, (s, _) in edge_map.items() if s == slot), None)
    if component.id is KcId.MATCH and occupant is not None:
        # a pinned petal already sits at the template slot: it is the target
        if edge_map[occupant] != (slot, ori):
            return None
        piece = TargetPiece("edge", frozenset(EDGE_COLORS[occupant]), slot)
        home = occupant
    else:
        candidates = [h for h in _WHITE_EDGE_HOMES if h not in edge_map]
        if component.id is not KcId.MATCH and ori == 0:
            # a white-down edge in its own home slot would already be placed
            candidates = [h for h in candidates if h != slot]
        if not candidates or occupant is not None:
            return None
        home = rng.choice(candidates)
        edge_map[home] = (slot, ori)
        piece = TargetPiece("edge", frozenset(EDGE_COLORS[home]), slot)

    if component.id is KcId.MAINTAIN:
        conflicts = _conflict_positions(template)
        whites_placed = {EDGE_SLOTS[s][o] for h, (s, o) in edge_map.items()
                         if h != home and _WHITE in EDGE_COLORS[h]}
        if not any(p in whites_placed for p in conflicts):
            spare = [h for h in _WHITE_EDGE_HOMES if h not in edge_map]
            if not spare:
                return None
            target_pos = rng.choice(conflicts)
            pslot, pori = _EDGE_POS[target_pos]
            if any(s == pslot for s, _ in edge_map.values()):
                return None
            edge_map[rng.choice(spare)] = (pslot, pori)
    elif component.id is KcId.MATCH:
        free_petals = [s for s in _PETAL_UP_SLOTS
                       if not any(slot_ == s for slot_, _ in edge_map.values())]
        spare = [h for h in _WHITE_EDGE_HOMES if h not in edge_map]
        rng.shuffle(spare)
        for h, s in zip(spare, free_petals):
            edge_map[h] = (s, 0)
    else:
        forbidden.update(_required_free(template))
    return piece


def _place_corner_target(component, template, rng, corner_map):
    slot, ori = _CORNER_POS[template.white_pos]
    if any(s == slot for s, _ in corner_map.values()):
        return None
    if component.id in (KcId.TOP_LAYER, KcId.RIGHT_CORNER, KcId.LEFT_CORNER):
        offset = 0
    elif component.id is KcId.MISMATCH:
        offset = rng.choice((1, 2, 3))
    else:  # Underneath: wrong slot, or twisted in place
        offset = rng.choice((1, 2, 3)) if ori == 0 else rng.choice((0, 1, 2, 3))
    ref = slot + 4 if slot < 4 else slot
    home = (ref - 4 + offset) % 4 + 4
    if home in corner_map:
        return None
    corner_map[home] = (slot, ori)
    return TargetPiece("corner", frozenset(CORNER_COLORS[home]), slot)


def _scatter(rng, edge_map, corner_map, forbidden):
    """Random placements for every remaining piece; white edges avoid the
    template's required-free petal positions by flipping to the side sticker."""
    free_edge_slots = [s for s in range(12)
                       if not any(slot == s for slot, _ in edge_map.values())]
    rng.shuffle(free_edge_slots)
    for home in range(12):
        if home in edge_map:
            continue
        slot = free_edge_slots.pop()
        ori = rng.randint(0, 1)
        if _WHITE in EDGE_COLORS[home] and EDGE_SLOTS[slot][ori] in forbidden:
            ori ^= 1
        edge_map[home] = (slot, ori)
    free_corner_slots = [s for s in range(8)
                         if not any(slot == s for slot, _ in corner_map.values())]
    rng.shuffle(free_corner_slots)
    for home in range(8):
        if home in corner_map:
            continue
        corner_map[home] = (free_corner_slots.pop(), rng.randint(0, 2))


def _repair(edge_map, corner_map):
    """Make the assignment reachable, touching only non-white pieces."""
    yellow_edges = sorted(h for h in range(12) if _WHITE not in EDGE_COLORS[h])
    yellow_corners = sorted(h for h in range(8) if _WHITE not in CORNER_COLORS[h])

    edge_perm = [0] * 12
    for home, (slot, _) in edge_map.items():
        edge_perm[slot] = home
    corner_perm = [0] * 8
    for home, (slot, _) in corner_map.items():
        corner_perm[slot] = home
    if _parity(edge_perm) != _parity(corner_perm):
        a, b = yellow_edges[0], yellow_edges[1]
        (sa, oa), (sb, ob) = edge_map[a], edge_map[b]
        edge_map[a], edge_map[b] = (sb, oa), (sa, ob)

    flip = sum(ori for _, ori in edge_map.values()) % 2
    if flip:
        slot, ori = edge_map[yellow_edges[0]]
        edge_map[yellow_edges[0]] = (slot, ori ^ 1)

    twist = sum(ori for _, ori in corner_map.values()) % 3
    if twist:
        slot, ori = corner_map[yellow_corners[0]]
        corner_map[yellow_corners[0]] = (slot, (ori - twist) % 3)


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


def _assemble(edge_map, corner_map) -> CubeState:
    stickers = bytearray(NORMALIZED_SOLVED.stickers)
    for home, (slot, ori) in edge_map.items():
        colors = EDGE_COLORS[home]
        a, b = EDGE_SLOTS[slot]
        stickers[a] = colors[ori]
        stickers[b] = colors[ori ^ 1]
    for home, (slot, ori) in corner_map.items():
        colors = CORNER_COLORS[home]
        triple = CORNER_SLOTS[slot]
        for i in range(3):
            stickers[triple[(ori + i) % 3]] = colors[i]
    return CubeState(bytes(stickers))
