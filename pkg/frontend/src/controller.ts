// Headless session controller: the single-threaded state machine between
// the transport and the renderer.  Server messages are authoritative; the
// only local mutation is optimistic move rendering, reconciled against every
// `rendered` message.  Each control emits exactly one protocol message.

import { applyMove, Facelet, SOLVED } from "./cube.js";
import {
  CatalogRecord, decode, encode, Envelope, HintPayload, SkillRow, TaskPayload,
} from "./protocol.js";

export interface Transport {
  send(line: string): void;
}

export type BackCorner = "top-right" | "top-left" | "bottom-right" | "bottom-left";

export interface ViewModel {
  facelet: Facelet;       // last authoritative state (rendered / task / welcome)
  localFacelet: Facelet;  // optimistic state the learner sees immediately
  mode: string;
  stage: string;
  rows: SkillRow[];
  catalog: CatalogRecord[];
  hint: HintPayload | null;
  hintFacelet: Facelet | null;
  task: TaskPayload | null;
  extendedViews: boolean;
  backCorner: BackCorner;
  banner: string | null;
  sessionId: string | null;
}

export type Signal = "render" | "chime";

const BACK_CORNERS: BackCorner[] = [
  "top-right", "top-left", "bottom-left", "bottom-right",
];

export class SessionController {
  vm: ViewModel = {
    facelet: SOLVED,
    localFacelet: SOLVED,
    mode: "exploration",
    stage: "white_flower",
    rows: [],
    catalog: [],
    hint: null,
    hintFacelet: null,
    task: null,
    extendedViews: true,
    backCorner: "top-right",
    banner: "connecting...",
    sessionId: null,
  };

  connected = false;
  private seq = 0;
  private transport: Transport | null = null;
  private outbox: string[] = [];
  private hadSession = false;

  constructor(
    private now: () => number = Date.now,
    private onSignal: (signal: Signal) => void = () => {},
    private sessionName: string | null = null,
  ) {}

  // -- transport lifecycle -----------------------------------------------------

  attach(transport: Transport): void {
    this.transport = transport;
    this.connected = true;
    this.vm.banner = null;
    this.hello();
    if (this.hadSession) {
      // a reconnect starts a fresh engine session: re-establish our state
      this.send("observe", { facelet: this.vm.localFacelet });
    }
    this.hadSession = true;
    for (const line of this.outbox.splice(0)) this.transport.send(line);
    this.signal("render");
  }

  detach(): void {
    this.connected = false;
    this.transport = null;
    this.vm.banner = "disconnected - queuing moves";
    this.signal("render");
  }

  onLine(line: string): void {
    this.handle(decode(line));
  }

  // -- controls: one protocol message each --------------------------------------

  hello(): void {
    const payload: Record<string, unknown> = {};
    if (this.sessionName) payload.session_id = this.sessionName;
    this.send("hello", payload);
  }

  userMove(notation: string): void {
    this.vm.localFacelet = applyMove(this.vm.localFacelet, notation);
    this.clearStaleHint();
    this.send("observe", { facelet: this.vm.localFacelet });
    this.signal("render");
  }

  requestHint(level: number): void {
    this.send("request_hint", { level });
  }

  requestTask(): void {
    if (this.vm.mode === "practice") {
      this.send("request_task", {});
    } else {
      this.send("set_mode", { mode: "practice" });
    }
  }

  toggleMode(): void {
    const mode = this.vm.mode === "practice" ? "exploration" : "practice";
    this.send("set_mode", { mode });
  }

  scramble(seed?: number): void {
    this.send("scramble", seed === undefined ? {} : { seed });
  }

  advanceStage(): void {
    this.send("advance_stage", {});
  }

  toggleExtendedViews(): void {
    this.vm.extendedViews = !this.vm.extendedViews;
    this.signal("render");
  }

  relocateBackView(): void {
    const i = BACK_CORNERS.indexOf(this.vm.backCorner);
    this.vm.backCorner = BACK_CORNERS[(i + 1) % BACK_CORNERS.length];
    this.signal("render");
  }

  handleKey(key: string): boolean {
    const moveKeys: Record<string, string> = {
      u: "U", r: "R", f: "F", d: "D", l: "L", b: "B",
      U: "U'", R: "R'", F: "F'", D: "D'", L: "L'", B: "B'",
      x: "x", y: "y", z: "z", X: "x'", Y: "y'", Z: "z'",
    };
    if (key in moveKeys) {
      this.userMove(moveKeys[key]);
      return true;
    }
    switch (key) {
      case "1": case "2": case "3":
        this.requestHint(Number(key));
        return true;
      case "s": this.scramble(); return true;
      case "t": this.requestTask(); return true;
      case "m": this.toggleMode(); return true;
      case "n": this.advanceStage(); return true;
      case "e": this.toggleExtendedViews(); return true;
      case "v": this.relocateBackView(); return true;
      default: return false;
    }
  }

  // -- server messages -----------------------------------------------------------

  private handle(message: Envelope): void {
    const payload = message.payload as Record<string, any>;
    switch (message.type) {
      case "welcome":
        this.vm.sessionId = payload.session_id;
        this.vm.catalog = payload.kc_catalog ?? [];
        this.vm.mode = payload.mode;
        this.vm.stage = payload.stage;
        this.adoptState(payload.facelet);
        break;
      case "rendered":
        this.adoptState(payload.facelet);
        break;
      case "task":
        this.vm.task = payload as TaskPayload;
        if (payload.status === "task") {
          this.adoptState(payload.facelet);
        }
        break;
      case "hint":
        this.vm.hint = payload as HintPayload;
        this.vm.hintFacelet = this.vm.facelet;
        break;
      case "skillometer":
        this.vm.rows = payload.rows ?? [];
        break;
      case "feedback":
        this.onSignal("chime");
        break;
      case "mode_changed":
        this.vm.mode = payload.mode;
        this.vm.stage = payload.stage;
        break;
      case "error":
        this.vm.banner = `${payload.code}: ${payload.message}`;
        break;
      default:
        break; // unknown server types are ignored
    }
    this.signal("render");
  }

  private adoptState(facelet: Facelet | undefined): void {
    if (!facelet) return;
    this.vm.facelet = facelet;
    if (this.vm.localFacelet !== facelet) {
      this.vm.localFacelet = facelet; // server view is authoritative
    }
    this.clearStaleHint();
  }

  private clearStaleHint(): void {
    if (this.vm.hint && this.vm.hintFacelet !== this.vm.localFacelet) {
      this.vm.hint = null;
      this.vm.hintFacelet = null;
    }
  }

  // -- plumbing -------------------------------------------------------------------

  private send(type: string, payload: Record<string, unknown>): void {
    this.seq += 1;
    const line = encode({
      seq: this.seq,
      type,
      payload: { ...payload, ts: this.now() },
    });
    if (this.connected && this.transport) {
      this.transport.send(line);
    } else {
      this.outbox.push(line);
    }
  }

  private signal(signal: Signal): void {
    this.onSignal(signal);
  }
}
