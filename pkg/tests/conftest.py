import random

import pytest

from cubetutor import cube
from cubetutor.cube import CubeState, normalize_orientation


def naive_distances(goal: CubeState, depth: int) -> dict[bytes, int]:
    """Plain forward breadth-first search from the goal over the 12 quarter
    turns: the independent distance oracle (normalized sticker bytes -> exact
    quarter-turn distance)."""
    root = normalize_orientation(goal)[0]
    dist = {root.stickers: 0}
    frontier = [root]
    for d in range(1, depth + 1):
        new = []
        for state in frontier:
            for move in cube.QUARTER_TURNS:
                child = state.apply(move)
                if child.stickers not in dist:
                    dist[child.stickers] = d
                    new.append(child)
        frontier = new
    return dist


def oracle_distance(dist: dict[bytes, int], state: CubeState):
    return dist.get(normalize_orientation(state)[0].stickers)


@pytest.fixture
def rng():
    return random.Random(20240815)


def random_legal_state(seed: int, n_moves: int = 25) -> CubeState:
    return cube.scramble(seed, n_moves)[0]


def random_states(count: int, offset: int = 0) -> list[CubeState]:
    return [random_legal_state(offset + i) for i in range(count)]
