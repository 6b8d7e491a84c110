// Wire protocol types: newline-delimited JSON envelopes, mirrored from
// docs/protocol.md on the engine side.

export interface Envelope {
  seq: number;
  type: string;
  payload: Record<string, unknown>;
}

export interface SkillRow {
  kc: string;
  score: number;
  mastered: boolean;
  attempts: number;
}

export interface HintStep {
  move: string;
  text: string;
}

export interface HintPayload {
  level: number;
  kc: string;
  piece: { kind: string; colors: string[] };
  highlight: number[];
  grayout: number[];
  steps: HintStep[];
}

export interface TaskPayload {
  status: "task" | "done";
  kc?: string;
  facelet?: string;
  piece?: { kind: string; colors: string[]; slot: number };
  template_index?: number;
  seed?: number;
}

export interface CatalogRecord {
  id: string;
  title: string;
  stage: string;
  difficulty: number;
  templates: number[];
}

export function encode(message: Envelope): string {
  return JSON.stringify(message);
}

export function decode(line: string): Envelope {
  return JSON.parse(line) as Envelope;
}
