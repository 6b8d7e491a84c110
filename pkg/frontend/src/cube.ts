// Facelet cube model for the client: 54 stickers, faces U R F D L B,
// row-major, colors WYGBRO.  Move tables are derived from the same layer
// geometry as the engine and cross-checked against engine fixtures in tests.

export type Facelet = string; // 54 chars over WYGBRO

export const FACES = "URFDLB";
export const SOLVED: Facelet =
  "W".repeat(9) + "R".repeat(9) + "G".repeat(9) +
  "Y".repeat(9) + "O".repeat(9) + "B".repeat(9);

type Vec = [number, number, number];

// (normal, row axis, col axis) per face, doubled integer coordinates
const FRAMES: Record<string, [Vec, Vec, Vec]> = {
  U: [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
  R: [[1, 0, 0], [0, -1, 0], [0, 0, -1]],
  F: [[0, 0, 1], [0, -1, 0], [1, 0, 0]],
  D: [[0, -1, 0], [0, 0, -1], [1, 0, 0]],
  L: [[-1, 0, 0], [0, -1, 0], [0, 0, 1]],
  B: [[0, 0, -1], [0, -1, 0], [-1, 0, 0]],
};

const ROT: Record<string, (v: Vec) => Vec> = {
  x: ([x, y, z]) => [x, -z, y],
  y: ([x, y, z]) => [z, y, -x],
  z: ([x, y, z]) => [-y, x, z],
};

const FACE_AXIS: Record<string, [string, number]> = {
  U: ["y", -1], D: ["y", 1], R: ["x", -1], L: ["x", 1], F: ["z", -1], B: ["z", 1],
};
const FACE_LAYER: Record<string, [number, number]> = {
  U: [1, 1], D: [1, -1], R: [0, 1], L: [0, -1], F: [2, 1], B: [2, -1],
};

function geometry(): { pos: Vec[]; nrm: Vec[] } {
  const pos: Vec[] = [];
  const nrm: Vec[] = [];
  for (const f of FACES) {
    const [n, r, c] = FRAMES[f];
    for (let row = 0; row < 3; row++) {
      for (let col = 0; col < 3; col++) {
        pos.push([0, 1, 2].map(
          (i) => 3 * n[i] + 2 * (row - 1) * r[i] + 2 * (col - 1) * c[i]) as Vec);
        nrm.push(n);
      }
    }
  }
  return { pos, nrm };
}

const { pos: POS, nrm: NRM } = geometry();
const keyOf = (p: Vec, n: Vec) => `${p.join(",")}/${n.join(",")}`;
const GEO_INDEX = new Map<string, number>();
POS.forEach((p, i) => GEO_INDEX.set(keyOf(p, NRM[i]), i));

function srcTable(axis: string, quarterTurns: number,
                  layer?: [number, number]): number[] {
  const rot = ROT[axis];
  const src = Array.from({ length: 54 }, (_, i) => i);
  for (let i = 0; i < 54; i++) {
    let p = POS[i];
    let n = NRM[i];
    if (layer) {
      const [coord, sign] = layer;
      if (p[coord] * sign < 1) continue;
    }
    for (let t = 0; t < ((quarterTurns % 4) + 4) % 4; t++) {
      p = rot(p);
      n = rot(n);
    }
    src[GEO_INDEX.get(keyOf(p, n))!] = i;
  }
  return src;
}

function buildTables(): Map<string, number[]> {
  const tables = new Map<string, number[]>();
  const amounts: Array<[string, number]> = [["", 1], ["'", -1], ["2", 2]];
  for (const f of FACES) {
    const [axis, sign] = FACE_AXIS[f];
    for (const [suffix, amount] of amounts) {
      const qt = amount === 2 ? 2 : sign * amount;
      tables.set(f + suffix, srcTable(axis, qt, FACE_LAYER[f]));
    }
  }
  for (const a of "xyz") {
    for (const [suffix, amount] of amounts) {
      const qt = amount === 2 ? 2 : -amount;
      tables.set(a + suffix, srcTable(a, qt));
    }
  }
  return tables;
}

const TABLES = buildTables();

export const MOVE_NOTATIONS = [...TABLES.keys()];

export function applyMove(facelet: Facelet, notation: string): Facelet {
  const src = TABLES.get(notation);
  if (!src) throw new Error(`unknown move ${notation}`);
  let out = "";
  for (let j = 0; j < 54; j++) out += facelet[src[j]];
  return out;
}

export function applyMoves(facelet: Facelet, notations: string[]): Facelet {
  return notations.reduce(applyMove, facelet);
}

export const COLOR_CSS: Record<string, string> = {
  W: "#f5f5f5",
  Y: "#ffd500",
  G: "#009b48",
  B: "#0045ad",
  R: "#b90000",
  O: "#ff5900",
};
