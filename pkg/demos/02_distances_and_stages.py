"""Distance search and the three first-layer stage goals.

Run: python demos/02_distances_and_stages.py
"""

from cubetutor import cube
from cubetutor.cube import parse_moves, scramble, serialize
from cubetutor.solver import Stage, min_steps, min_steps_path, solve_first_layer, stage_goal_met

print("Distances count quarter turns; reorientations are free.")
goal = scramble(7, 25)[0]
for word in ("R", "R2", "R U R' U'", "y x"):
    state = goal.apply_all(parse_moves(word))
    result = min_steps(state, goal, 7)
    print(f"  after {word:>10}: distance {result.value}")

print("\nBeyond the cap the search reports the exceeds-cap marker:")
far = scramble(99, 25)[0]
print(f"  scramble vs solved, cap 5: {min_steps(far, cube.SOLVED, 5)}")

print("\nA witness path can be recovered for finite distances:")
state = goal.apply_all(parse_moves("F U2"))
path = min_steps_path(state, goal, 4)
print("  witness:", " ".join(m.notation for m in path))

print("\nStage goals (evaluated orientation-free):")
daisy = cube.NORMALIZED_SOLVED.apply_all(parse_moves("F2 R2 B2 L2"))
for name, state in (("solved", cube.SOLVED), ("daisy", daisy)):
    flags = [stage_goal_met(state, s) for s in Stage]
    print(f"  {name:>7}: flower={flags[0]} cross={flags[1]} corners={flags[2]}")

print("\nThe greedy first-layer solver chains canonical macros:")
state = scramble(3, 25)[0]
solution = solve_first_layer(state)
print(f"  {len(solution)} moves, {sum(m.quarter_turns for m in solution)} quarter turns")
print("  " + " ".join(m.notation for m in solution))
print("  four corners met:",
      stage_goal_met(state.apply_all(solution), Stage.FOUR_CORNERS))
