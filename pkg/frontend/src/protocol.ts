/**
 * Wire protocol frames, mirroring docs/protocol.md field for field.
 *
 * Every frame the console emits passes validateFrame() before it is sent;
 * the integration tests also validate everything received.
 */

export const PROTOCOL_VERSION = 1;

export type MessageType =
  | "pose"
  | "touch"
  | "button"
  | "cursor"
  | "stimulus"
  | "click_result"
  | "session_control";

export interface WireFrame {
  v: number;
  type: MessageType;
  sid: string;
  seq: number;
  t_us: number;
  body: Record<string, unknown>;
}

export type TouchPhase = "down" | "move" | "up";
export type ButtonName = "pad" | "trigger" | "menu" | "grip";
export type ButtonEdge = "press" | "release";

export interface CursorBody {
  x: number;
  y: number;
  mode: string;
}

export interface StimulusBody {
  set_index: number;
  technique: string;
  width_px: number;
  amplitude_px: number;
  left_center_x: number;
  right_center_x: number;
  target: "left" | "right";
  target_color?: string;
  other_color?: string;
}

export interface ClickResultBody {
  hit: boolean;
  set_index: number;
  trial_index: number;
  x: number;
  y: number;
}

const MESSAGE_TYPES: ReadonlySet<string> = new Set([
  "pose", "touch", "button", "cursor", "stimulus", "click_result",
  "session_control",
]);

export function encodeFrame(frame: WireFrame): string {
  return JSON.stringify({
    v: frame.v, type: frame.type, sid: frame.sid, seq: frame.seq,
    t_us: frame.t_us, body: frame.body,
  });
}

export function decodeFrame(text: string): WireFrame {
  const raw = JSON.parse(text) as Record<string, unknown>;
  const frame = raw as unknown as WireFrame;
  const error = validateFrame(frame);
  if (error !== null) {
    throw new Error(`invalid frame: ${error}`);
  }
  return frame;
}

function isFiniteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isInt(v: unknown): v is number {
  return typeof v === "number" && Number.isInteger(v);
}

/** Returns null for a valid frame, else a description of the defect. */
export function validateFrame(frame: WireFrame): string | null {
  if (frame.v !== PROTOCOL_VERSION) return `unsupported version ${frame.v}`;
  if (!MESSAGE_TYPES.has(frame.type)) return `unknown type ${frame.type}`;
  if (typeof frame.sid !== "string") return "sid must be a string";
  if (!isInt(frame.seq) || frame.seq < 1) return "seq must be a positive integer";
  if (!isInt(frame.t_us) || frame.t_us < 0) return "t_us must be a non-negative integer";
  const body = frame.body;
  if (typeof body !== "object" || body === null) return "body must be an object";

  switch (frame.type) {
    case "pose": {
      const m = body.m;
      if (!Array.isArray(m) || m.length !== 16 || !m.every(isFiniteNumber)) {
        return "pose body needs m: 16 finite numbers";
      }
      if (!isInt(body.buttons)) return "pose body needs an integer buttons mask";
      return null;
    }
    case "touch": {
      if (body.phase !== "down" && body.phase !== "move" && body.phase !== "up") {
        return "touch phase must be down|move|up";
      }
      if (!isFiniteNumber(body.x) || !isFiniteNumber(body.y)) {
        return "touch body needs finite x, y";
      }
      return null;
    }
    case "button": {
      const names: unknown[] = ["pad", "trigger", "menu", "grip"];
      if (!names.includes(body.name)) return "bad button name";
      if (body.edge !== "press" && body.edge !== "release") return "bad button edge";
      return null;
    }
    case "cursor": {
      if (!isFiniteNumber(body.x) || !isFiniteNumber(body.y)) {
        return "cursor body needs finite x, y";
      }
      if (typeof body.mode !== "string") return "cursor body needs a mode tag";
      return null;
    }
    case "stimulus": {
      for (const key of ["width_px", "amplitude_px", "left_center_x",
                         "right_center_x"]) {
        if (!isFiniteNumber(body[key])) return `stimulus body needs ${key}`;
      }
      if (!isInt(body.set_index)) return "stimulus body needs set_index";
      if (body.target !== "left" && body.target !== "right") {
        return "stimulus target must be left|right";
      }
      return null;
    }
    case "click_result": {
      if (typeof body.hit !== "boolean") return "click_result needs hit flag";
      if (!isInt(body.set_index) || !isInt(body.trial_index)) {
        return "click_result needs set_index and trial_index";
      }
      if (!isFiniteNumber(body.x) || !isFiniteNumber(body.y)) {
        return "click_result needs finite x, y";
      }
      return null;
    }
    case "session_control": {
      if (typeof body.action !== "string") return "session_control needs action";
      return null;
    }
  }
  return null;
}

// ----------------------------------------------------------------- builders

export function makePose(sid: string, seq: number, tUs: number,
                         matrix: number[], buttons: number): WireFrame {
  return { v: PROTOCOL_VERSION, type: "pose", sid, seq, t_us: tUs,
           body: { m: matrix, buttons } };
}

export function makeTouch(sid: string, seq: number, tUs: number,
                          phase: TouchPhase, x: number, y: number): WireFrame {
  return { v: PROTOCOL_VERSION, type: "touch", sid, seq, t_us: tUs,
           body: { phase, x, y } };
}

export function makeButton(sid: string, seq: number, tUs: number,
                           name: ButtonName, edge: ButtonEdge): WireFrame {
  return { v: PROTOCOL_VERSION, type: "button", sid, seq, t_us: tUs,
           body: { name, edge } };
}

export function makeHello(sid: string, seq: number, tUs: number,
                          role: "producer" | "consumer", technique?: string,
                          sets?: { width_px: number; amplitude_px: number }[],
                          ): WireFrame {
  const body: Record<string, unknown> = { action: "hello", role };
  if (technique !== undefined) body.technique = technique;
  if (sets !== undefined) body.sets = sets;
  return { v: PROTOCOL_VERSION, type: "session_control", sid, seq, t_us: tUs,
           body };
}
