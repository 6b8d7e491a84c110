// Pure view geometry: the splayed cube (center face plus four trapezoidal
// extended views and a shrunk mirrored back view), the isometric thumbnail,
// hint overlays, same-block connectivity arcs, and the stage goal image.
// Everything returns plain data so it is testable without a DOM.

import { COLOR_CSS, Facelet } from "./cube.js";
import { HintPayload } from "./protocol.js";
import { BackCorner } from "./controller.js";

export interface StickerShape {
  index: number;          // facelet index 0..53, or -1 for goal fillers
  points: string;         // SVG polygon points
  fill: string;
  highlight: boolean;
  grayout: boolean;
}

export interface ArcShape {
  from: number;
  to: number;
  path: string;           // SVG path, dotted connector between block mates
}

export interface ArrowShape {
  face: string;
  text: string;
  path: string;
  labelX: number;
  labelY: number;
}

export interface CubeScene {
  stickers: StickerShape[];
  arcs: ArcShape[];
  arrows: ArrowShape[];
  width: number;
  height: number;
}

const FACE_BASE: Record<string, number> = { U: 0, R: 9, F: 18, D: 27, L: 36, B: 45 };

// Splay layout constants (viewBox units).
const S = 34;             // center face sticker size
const CX = 170;
const CY = 170;
const GAP = 4;

type Quad = [number, number][];

function quadPoints(q: Quad): string {
  return q.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" ");
}

function centerOf(q: Quad): [number, number] {
  const x = q.reduce((a, p) => a + p[0], 0) / 4;
  const y = q.reduce((a, p) => a + p[1], 0) / 4;
  return [x, y];
}

// Center face: rows top to bottom, cols left to right.
function faceQuad(row: number, col: number): Quad {
  const x0 = CX + (col - 1.5) * S;
  const y0 = CY + (row - 1.5) * S;
  return [[x0, y0], [x0 + S, y0], [x0 + S, y0 + S], [x0, y0 + S]];
}

// A trapezoid band: `depth` 0 is nearest the center face; lateral position t
// in 0..3; shrink factors fan the band outward.
function trapezoidQuad(side: "up" | "down" | "left" | "right",
                       depth: number, t: number): Quad {
  const near = 1 - 0.16 * depth;
  const far = 1 - 0.16 * (depth + 1);
  const edge = 1.5 * S + GAP;
  const d0 = edge + depth * S * 0.82 - GAP;
  const d1 = edge + (depth + 1) * S * 0.82 - GAP;
  const a0 = (t - 1.5) * S * near;
  const a1 = (t - 0.5) * S * near;
  const b0 = (t - 1.5) * S * far;
  const b1 = (t - 0.5) * S * far;
  switch (side) {
    case "up":
      return [[CX + b0, CY - d1], [CX + b1, CY - d1],
              [CX + a1, CY - d0], [CX + a0, CY - d0]];
    case "down":
      return [[CX + a0, CY + d0], [CX + a1, CY + d0],
              [CX + b1, CY + d1], [CX + b0, CY + d1]];
    case "left":
      return [[CX - d1, CY + b0], [CX - d0, CY + a0],
              [CX - d0, CY + a1], [CX - d1, CY + b1]];
    case "right":
      return [[CX + d0, CY + a0], [CX + d1, CY + b0],
              [CX + d1, CY + b1], [CX + d0, CY + a1]];
  }
}

// Facelet index -> quad for the splayed projection.  The center face is F;
// trapezoids reveal U, D, L, R; B is drawn shrunk and mirrored in a corner.
function splayQuads(backCorner: BackCorner, extended: boolean): Map<number, Quad> {
  const quads = new Map<number, Quad>();
  for (let row = 0; row < 3; row++) {
    for (let col = 0; col < 3; col++) {
      quads.set(FACE_BASE.F + 3 * row + col, faceQuad(row, col));
    }
  }
  if (extended) {
    for (let row = 0; row < 3; row++) {
      for (let col = 0; col < 3; col++) {
        // U: bottom row (U7..U9) borders F, columns aligned
        quads.set(FACE_BASE.U + 3 * row + col,
                  trapezoidQuad("up", 2 - row, col));
        // D: top row (D1..D3) borders F
        quads.set(FACE_BASE.D + 3 * row + col,
                  trapezoidQuad("down", row, col));
        // L: right column (L3,L6,L9) borders F, rows aligned
        quads.set(FACE_BASE.L + 3 * row + col,
                  trapezoidQuad("left", 2 - col, row));
        // R: left column (R1,R4,R7) borders F
        quads.set(FACE_BASE.R + 3 * row + col,
                  trapezoidQuad("right", col, row));
      }
    }
  }
  // shrunk mirrored back view, relocatable
  const size = S * 0.55;
  const inset = 8;
  const corner: Record<BackCorner, [number, number]> = {
    "top-left": [inset, inset],
    "top-right": [340 - inset - 3 * size, inset],
    "bottom-left": [inset, 340 - inset - 3 * size],
    "bottom-right": [340 - inset - 3 * size, 340 - inset - 3 * size],
  };
  const [bx, by] = corner[backCorner];
  for (let row = 0; row < 3; row++) {
    for (let col = 0; col < 3; col++) {
      const mirroredCol = 2 - col; // mirrored: as if seen through the cube
      const x0 = bx + mirroredCol * size;
      const y0 = by + row * size;
      quads.set(FACE_BASE.B + 3 * row + col,
                [[x0, y0], [x0 + size, y0], [x0 + size, y0 + size], [x0, y0 + size]]);
    }
  }
  return quads;
}

// Same-block connectivity between each trapezoid's inner band and the center
// face (corner-edge-corner triples per side).
const BLOCK_ARCS: Array<[number, number]> = [
  [6, 18], [7, 19], [8, 20],        // U7-F1, U8-F2, U9-F3
  [27, 24], [28, 25], [29, 26],     // D1-F7, D2-F8, D3-F9
  [38, 18], [41, 21], [44, 24],     // L3-F1, L6-F4, L9-F7
  [9, 20], [12, 23], [15, 26],      // R1-F3, R4-F6, R7-F9
];

const ARROW_ANCHOR: Record<string, [number, number]> = {
  F: [CX, CY],
  U: [CX, CY - 2.6 * S],
  D: [CX, CY + 2.6 * S],
  L: [CX - 2.6 * S, CY],
  R: [CX + 2.6 * S, CY],
  B: [CX, CY - 3.4 * S],
  x: [CX + 3.2 * S, CY],
  y: [CX, CY - 3.2 * S],
  z: [CX, CY],
};

export function cubeScene(facelet: Facelet, hint: HintPayload | null,
                          backCorner: BackCorner, extended: boolean): CubeScene {
  const highlight = new Set(hint?.highlight ?? []);
  const grayout = new Set(hint && hint.level >= 2 ? hint.grayout : []);
  const quads = splayQuads(backCorner, extended);
  const stickers: StickerShape[] = [];
  for (const [index, quad] of quads) {
    stickers.push({
      index,
      points: quadPoints(quad),
      fill: COLOR_CSS[facelet[index]],
      highlight: highlight.has(index),
      grayout: grayout.has(index),
    });
  }
  const arcs: ArcShape[] = [];
  if (extended) {
    for (const [from, to] of BLOCK_ARCS) {
      const [x1, y1] = centerOf(quads.get(from)!);
      const [x2, y2] = centerOf(quads.get(to)!);
      const mx = (x1 + x2) / 2 + (y2 - y1) * 0.2;
      const my = (y1 + y2) / 2 + (x1 - x2) * 0.2;
      arcs.push({ from, to, path: `M ${x1} ${y1} Q ${mx} ${my} ${x2} ${y2}` });
    }
  }
  const arrows: ArrowShape[] = [];
  if (hint && hint.level >= 3) {
    hint.steps.forEach((step, i) => {
      const face = step.move[0];
      const [ax, ay] = ARROW_ANCHOR[face] ?? [CX, CY];
      const r = 0.8 * S + i * 6;
      const sweep = step.move.includes("'") ? 0 : 1;
      arrows.push({
        face,
        text: `${i + 1}. ${step.text}`,
        path: `M ${ax - r} ${ay} A ${r} ${r} 0 1 ${sweep} ${ax + r} ${ay}`,
        labelX: ax,
        labelY: ay - r - 6,
      });
    });
  }
  return { stickers, arcs, arrows, width: 340, height: 340 };
}

// Isometric thumbnail of the three visible faces (U, F, R).
export function isometricScene(facelet: Facelet): CubeScene {
  const u = 13;
  const ox = 60;
  const oy = 46;
  const stickers: StickerShape[] = [];
  const px = (i: number, j: number): [number, number] =>
    [ox + (i - j) * u, oy + (i + j) * u * 0.58];
  for (let row = 0; row < 3; row++) {
    for (let col = 0; col < 3; col++) {
      // U face rhombus: row toward the viewer, col rightward
      const quad: Quad = [px(col, 2 - row + 1), px(col + 1, 2 - row + 1),
                          px(col + 1, 2 - row), px(col, 2 - row)];
      stickers.push(shape(FACE_BASE.U + 3 * row + col, quad));
    }
  }
  const frontTop = (col: number) => px(col, 3);
  for (let row = 0; row < 3; row++) {
    for (let col = 0; col < 3; col++) {
      const [x0, y0] = frontTop(col);
      const [x1, y1] = frontTop(col + 1);
      const dy = u * 0.9;
      const quad: Quad = [[x0, y0 + row * dy], [x1, y1 + row * dy],
                          [x1, y1 + (row + 1) * dy], [x0, y0 + (row + 1) * dy]];
      stickers.push(shape(FACE_BASE.F + 3 * row + col, quad));
    }
  }
  const rightTop = (depth: number) => px(3, 3 - depth);
  for (let row = 0; row < 3; row++) {
    for (let col = 0; col < 3; col++) {
      const [x0, y0] = rightTop(col);
      const [x1, y1] = rightTop(col + 1);
      const dy = u * 0.9;
      const quad: Quad = [[x0, y0 + row * dy], [x1, y1 + row * dy],
                          [x1, y1 + (row + 1) * dy], [x0, y0 + (row + 1) * dy]];
      stickers.push(shape(FACE_BASE.R + 3 * row + col, quad));
    }
  }
  return { stickers, arcs: [], arrows: [], width: 120, height: 108 };

  function shape(index: number, quad: Quad): StickerShape {
    return {
      index,
      points: quadPoints(quad),
      fill: COLOR_CSS[facelet[index]],
      highlight: false,
      grayout: false,
    };
  }
}

// Stage goal image: a flat net where only the stage-relevant stickers are
// colored (normalized scheme: White down, Yellow up, Green front) and the
// rest are grayed out.
const GOAL_STICKERS: Record<string, Record<number, string>> = {
  white_flower: { 1: "W", 3: "W", 5: "W", 7: "W", 4: "Y" },
  white_cross: {
    28: "W", 30: "W", 32: "W", 34: "W", 31: "W",
    25: "G", 22: "G", 16: "O", 13: "O", 43: "R", 40: "R", 52: "B", 49: "B",
  },
  four_corners: {
    27: "W", 28: "W", 29: "W", 30: "W", 31: "W", 32: "W", 33: "W", 34: "W", 35: "W",
    24: "G", 25: "G", 26: "G", 22: "G",
    15: "O", 16: "O", 17: "O", 13: "O",
    42: "R", 43: "R", 44: "R", 40: "R",
    51: "B", 52: "B", 53: "B", 49: "B",
  },
};

export function goalScene(stage: string): CubeScene {
  const goal = GOAL_STICKERS[stage] ?? {};
  const size = 11;
  const originFor: Record<string, [number, number]> = {
    U: [3 * size, 0], L: [0, 3 * size], F: [3 * size, 3 * size],
    R: [6 * size, 3 * size], B: [9 * size, 3 * size], D: [3 * size, 6 * size],
  };
  const stickers: StickerShape[] = [];
  for (const face of "URFDLB") {
    const [ox, oy] = originFor[face];
    for (let row = 0; row < 3; row++) {
      for (let col = 0; col < 3; col++) {
        const index = FACE_BASE[face] + 3 * row + col;
        const color = goal[index];
        const x0 = ox + col * size;
        const y0 = oy + row * size;
        stickers.push({
          index,
          points: quadPoints([[x0, y0], [x0 + size, y0],
                              [x0 + size, y0 + size], [x0, y0 + size]]),
          fill: color ? COLOR_CSS[color] : "#3a3a3a",
          highlight: Boolean(color),
          grayout: !color,
        });
      }
    }
  }
  return { stickers, arcs: [], arrows: [], width: 12 * size, height: 9 * size };
}
