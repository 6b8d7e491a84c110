import { describe, expect, it } from "vitest";

import { applyMove, applyMoves, MOVE_NOTATIONS, SOLVED } from "../src/cube.js";
import fixtures from "../fixtures/moves.json";

describe("client move tables against the engine", () => {
  it("agrees on the solved state", () => {
    expect(SOLVED).toBe(fixtures.solved);
  });

  it("covers all 27 moves", () => {
    expect(MOVE_NOTATIONS).toHaveLength(27);
    expect(Object.keys(fixtures.after_move).sort()).toEqual(
      [...MOVE_NOTATIONS].sort());
  });

  it("matches the engine for every move from solved", () => {
    for (const [notation, expected] of Object.entries(fixtures.after_move)) {
      expect(applyMove(SOLVED, notation), notation).toBe(expected);
    }
  });

  it("matches the engine along a scramble replay", () => {
    let state = SOLVED;
    for (const step of fixtures.replay) {
      state = applyMove(state, step.move);
      expect(state).toBe(step.facelet);
    }
  });

  it("inverse moves cancel", () => {
    for (const notation of MOVE_NOTATIONS) {
      const inverse = notation.endsWith("2") ? notation
        : notation.endsWith("'") ? notation[0] : notation + "'";
      expect(applyMoves(SOLVED, [notation, inverse])).toBe(SOLVED);
    }
  });
});
