import random

import pytest

from conftest import naive_distances, oracle_distance, random_legal_state

from cubetutor import cube, solver
from cubetutor.cube import SOLVED, parse_move, parse_moves, scramble
from cubetutor.errors import IllegalState
from cubetutor.solver import (
    DistanceResult, GoalDistances, Stage, min_steps, min_steps_path,
    solve_first_layer, stage_goal_met,
)


class TestDistanceResult:
    def test_exceeds_orders_above_finite(self):
        exceeds = DistanceResult(None, 7)
        assert exceeds > DistanceResult(7, 7)
        assert exceeds == DistanceResult(None, 5)
        assert DistanceResult(3, 7) < DistanceResult(4, 7)
        assert DistanceResult(3, 7) == DistanceResult(3, 4)

    def test_value_bounded_by_cap(self):
        with pytest.raises(ValueError):
            DistanceResult(8, 7)


class TestMinSteps:
    def test_identity(self):
        state = random_legal_state(5)
        assert min_steps(state, state, 0).value == 0

    def test_single_quarter_turn(self):
        goal = random_legal_state(8)
        state = goal.apply(parse_move("R"))
        assert min_steps(state, goal, 4).value == 1

    def test_half_turn_counts_two(self):
        goal = random_legal_state(9)
        for move in cube.FACE_TURNS:
            d = min_steps(goal.apply(move), goal, 2).value
            assert d == (2 if move.amount == cube.HALF else 1)

    def test_reorients_are_free(self):
        goal = random_legal_state(10)
        rotated = goal.apply(parse_move("y")).apply(parse_move("x"))
        assert min_steps(rotated, goal, 2).value == 0

    def test_matches_naive_bfs_to_depth_three(self):
        goal = random_legal_state(11)
        oracle = naive_distances(goal, 3)
        seen = 0
        for stickers, expected in oracle.items():
            state = cube.CubeState(stickers)
            assert min_steps(state, goal, 3).value == expected
            seen += 1
        assert seen == 1 + 12 + 114 + 1068

    def test_exceeds_cap_for_faraway_states(self):
        goal = random_legal_state(12)
        oracle = naive_distances(goal, 2)
        far = random_legal_state(999)
        if oracle_distance(oracle, far) is None:
            assert min_steps(far, goal, 2).exceeds_cap

    def test_scrambles_exceed_cap_five(self):
        finite = 0
        for seed in range(100):
            state = scramble(seed, 25)[0]
            result = min_steps(state, SOLVED, 5)
            if not result.exceeds_cap:
                finite += 1
                path = min_steps_path(state, SOLVED, 5)
                assert path is not None and len(path) == result.value
                assert state.apply_all(path) == cube.NORMALIZED_SOLVED
        assert finite <= 1  # >= 99% of seeds

    def test_symmetry(self, rng):
        for _ in range(100):
            a = random_legal_state(rng.randrange(10_000))
            word = [rng.choice(cube.QUARTER_TURNS) for _ in range(rng.randrange(5))]
            b = a.apply_all(word)
            assert min_steps(a, b, 5) == min_steps(b, a, 5)

    def test_triangle_inequality(self, rng):
        for _ in range(100):
            a = random_legal_state(rng.randrange(10_000))
            b = a.apply_all(rng.choice(cube.QUARTER_TURNS) for _ in range(rng.randrange(4)))
            c = b.apply_all(rng.choice(cube.QUARTER_TURNS) for _ in range(rng.randrange(4)))
            dab = min_steps(a, b, 7)
            dbc = min_steps(b, c, 7)
            dac = min_steps(a, c, 7)
            if not (dab.exceeds_cap or dbc.exceeds_cap or dac.exceeds_cap):
                assert dac.value <= dab.value + dbc.value

    def test_single_move_distance_bounds(self):
        state = random_legal_state(77)
        for move in cube.FACE_TURNS:
            assert min_steps(state, state.apply(move), 2).value in (1, 2)

    def test_illegal_state_rejected(self):
        stickers = bytearray(SOLVED.stickers)
        a, b = cube.EDGE_SLOTS[0]
        stickers[a], stickers[b] = stickers[b], stickers[a]
        with pytest.raises(IllegalState):
            min_steps(cube.CubeState(bytes(stickers)), SOLVED, 3)

    def test_goal_distances_memo_consistent(self):
        goal = random_legal_state(21)
        memo = GoalDistances(goal, 4)
        oracle = naive_distances(goal, 4)
        rng = random.Random(4)
        picks = rng.sample(sorted(oracle), 200)
        for stickers in picks:
            assert memo.distance(cube.CubeState(stickers)).value == oracle[stickers]


def daisy_state():
    """Solved with the four cross edges flipped up around the Yellow center."""
    return cube.NORMALIZED_SOLVED.apply_all(parse_moves("F2 R2 B2 L2"))


class TestStageGoals:
    def test_solved_four_corners(self):
        assert stage_goal_met(SOLVED, Stage.FOUR_CORNERS)
        assert stage_goal_met(SOLVED, Stage.WHITE_CROSS)

    def test_solved_flower_false(self):
        assert not stage_goal_met(SOLVED, Stage.WHITE_FLOWER)

    def test_daisy_state_meets_flower(self):
        state = daisy_state()
        assert stage_goal_met(state, Stage.WHITE_FLOWER)
        assert not stage_goal_met(state, Stage.WHITE_CROSS)

    def test_goals_reorient_invariant(self):
        state = daisy_state().apply(parse_move("x"))
        assert stage_goal_met(state, Stage.WHITE_FLOWER)

    def test_cross_requires_matching_side_centers(self):
        # rotate the bottom layer: whites stay down but sides mismatch
        state = cube.NORMALIZED_SOLVED.apply(parse_move("D"))
        assert not stage_goal_met(state, Stage.WHITE_CROSS)

    def test_stage_masks_nested_pieces(self):
        masks = solver.STAGE_MASKS
        assert masks[Stage.WHITE_FLOWER]
        assert len(masks[Stage.FOUR_CORNERS]) > len(masks[Stage.WHITE_CROSS])


class TestSolveFirstLayer:
    def test_solved_needs_nothing(self):
        assert solve_first_layer(SOLVED) == []

    def test_u_turn_of_finished_layer_needs_nothing(self):
        turned = cube.NORMALIZED_SOLVED.apply(parse_move("U"))
        assert stage_goal_met(turned, Stage.FOUR_CORNERS)
        assert solve_first_layer(turned) == []

    def test_scrambles_within_budget(self):
        for seed in range(500):
            state = scramble(seed, 25)[0]
            solution = solve_first_layer(state)
            assert sum(m.quarter_turns for m in solution) <= 60, seed
            assert stage_goal_met(state.apply_all(solution), Stage.FOUR_CORNERS), seed

    def test_solution_uses_face_turns_only(self):
        state = scramble(3, 25)[0]
        assert all(m.is_face_turn for m in solve_first_layer(state))

    def test_works_from_unnormalized_orientation(self):
        state = scramble(4, 25)[0].apply(parse_move("z"))
        solution = solve_first_layer(state)
        assert stage_goal_met(state.apply_all(solution), Stage.FOUR_CORNERS)
