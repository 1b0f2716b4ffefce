// Wire protocol: newline-delimited JSON, one object per line. Mirrors the
// session server exactly; unknown fields are ignored, unknown types are
// surfaced to the caller so the UI can show them.

export type Vec3 = [number, number, number];

export type Mode = "offset" | "velocity";

export interface StateFrame {
  type: "state_frame";
  t: number;
  x_r: Vec3;
  x_d: Vec3;
  f_r: Vec3;
  f_master: Vec3;
  bond: boolean;
  delay: number;
}

export interface EventMsg {
  type: "event";
  kind: string;
  t: number;
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export type ServerMessage = StateFrame | EventMsg | ErrorMsg;

export interface OperatorInput {
  type: "operator_input";
  t: number;
  x_m: Vec3;
  k_h: number;
  mode: Mode;
}

export function clamp(v: number, lo: number, hi: number): number {
  return v < lo ? lo : v > hi ? hi : v;
}

export function clampGain(raw: number): number {
  return clamp(raw, 0, 1);
}

export function clampWorkspace(x: Vec3, limit: number): Vec3 {
  return [
    clamp(x[0], -limit, limit),
    clamp(x[1], -limit, limit),
    clamp(x[2], -limit, limit),
  ];
}

export function encodeOperatorInput(
  t: number,
  xM: Vec3,
  kH: number,
  mode: Mode,
  workspaceLimit: number,
): string {
  const msg: OperatorInput = {
    type: "operator_input",
    t,
    x_m: clampWorkspace(xM, workspaceLimit),
    k_h: clampGain(kH),
    mode,
  };
  return JSON.stringify(msg) + "\n";
}

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every((c) => typeof c === "number");
}

/** Parse one line; returns null for blank lines, throws on malformed input. */
export function parseServerLine(line: string): ServerMessage | null {
  const trimmed = line.trim();
  if (!trimmed) return null;
  let obj: Record<string, unknown>;
  try {
    obj = JSON.parse(trimmed);
  } catch {
    throw new Error(`not valid JSON: ${trimmed.slice(0, 80)}`);
  }
  switch (obj.type) {
    case "state_frame": {
      if (!isVec3(obj.x_r) || !isVec3(obj.x_d) || !isVec3(obj.f_r) ||
          !isVec3(obj.f_master) || typeof obj.t !== "number") {
        throw new Error("malformed state_frame");
      }
      return {
        type: "state_frame",
        t: obj.t,
        x_r: obj.x_r,
        x_d: obj.x_d,
        f_r: obj.f_r,
        f_master: obj.f_master,
        bond: Boolean(obj.bond),
        delay: typeof obj.delay === "number" ? obj.delay : 0,
      };
    }
    case "event":
      return {
        type: "event",
        kind: String(obj.kind ?? "unknown"),
        t: typeof obj.t === "number" ? obj.t : 0,
      };
    case "error":
      return { type: "error", message: String(obj.message ?? "") };
    default:
      throw new Error(`unknown message type: ${String(obj.type)}`);
  }
}

/** Split a text chunk into complete NDJSON lines, keeping the remainder. */
export function splitLines(buffer: string, chunk: string): { lines: string[]; rest: string } {
  const data = buffer + chunk;
  const parts = data.split("\n");
  const rest = parts.pop() ?? "";
  return { lines: parts.filter((l) => l.length > 0), rest };
}
