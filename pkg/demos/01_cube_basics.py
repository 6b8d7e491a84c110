"""Cube model walkthrough: states, moves, serialization, legality.

Run: python demos/01_cube_basics.py
"""

from cubetutor import cube
from cubetutor.cube import SOLVED, parse_move, parse_moves, scramble, serialize


def show(title, state):
    print(f"{title:>28}: {serialize(state)}")


print("The cube is 54 stickers, faces U R F D L B, row-major.")
show("solved", SOLVED)

print("\nMoves are face turns (R, R', R2) and whole-cube rotations (x, y, z).")
state = SOLVED.apply(parse_move("R"))
show("after R", state)
print("The front right column now shows the Down color:",
      [state.color(p).name for p in (cube.F3, cube.F6, cube.F9)])

print("\nEvery move has an inverse; R then R' is the identity:")
show("after R R'", state.apply(parse_move("R'")))

print("\nWhole-cube rotations change nothing but the viewpoint;")
print("normalization puts the White center down and Green front:")
rotated = SOLVED.apply_all(parse_moves("x y z"))
normalized, word = cube.normalize_orientation(rotated)
print(f"{'reorientation applied':>28}: {' '.join(m.notation for m in word)}")
show("normalized", normalized)

print("\nScrambles are deterministic in their seed and always reachable:")
state, moves = scramble(42, 25)
print(f"{'scramble(42, 25)':>28}: {' '.join(m.notation for m in moves)}")
show("state", state)
print(f"{'is_legal':>28}: {cube.is_legal(state)}")

print("\nPeeling two stickers of an edge makes the state unreachable:")
flipped = bytearray(SOLVED.stickers)
a, b = cube.EDGE_SLOTS[1]
flipped[a], flipped[b] = flipped[b], flipped[a]
print(f"{'single flipped edge legal':>28}: "
      f"{cube.is_legal(cube.CubeState(bytes(flipped)))}")
