// Operator input model. The pointer offset inside the workspace box maps to
// the master pose x_M: directly in offset mode, and as a velocity stick in
// velocity mode (same mapping; the server integrates). A z slider covers the
// out-of-plane axis and the gain slider stands in for the grasp DoF.

import { clamp, clampWorkspace, type Mode, type Vec3 } from "./protocol.js";

export interface SceneInfo {
  workspace: number; // master box half-width [m]
  band: number;      // replica accuracy band [m]
  delay: number;
}

export class InputModel {
  mode: Mode = "offset";
  kH = 0.5;
  z = 0;
  pointer: Vec3 = [0, 0, 0];
  engaged = false; // pointer held down inside the workspace pad

  constructor(public workspaceLimit: number) {}

  /** Map a pointer position (px, relative to pad center) into x_M [m]. */
  setPointerFromPad(dxPx: number, dyPx: number, padHalfPx: number): void {
    const scale = this.workspaceLimit / padHalfPx;
    // screen y grows downward; the workspace y grows upward
    this.pointer = clampWorkspace(
      [dxPx * scale, -dyPx * scale, this.z],
      this.workspaceLimit,
    );
  }

  release(): void {
    this.engaged = false;
    this.pointer = [0, 0, this.z];
  }

  setGain(raw: number): void {
    this.kH = clamp(raw, 0, 1);
  }

  setZ(raw: number): void {
    this.z = clamp(raw, -this.workspaceLimit, this.workspaceLimit);
    this.pointer = [this.pointer[0], this.pointer[1], this.z];
  }

  toggleMode(): Mode {
    this.mode = this.mode === "offset" ? "velocity" : "offset";
    return this.mode;
  }

  current(): { xM: Vec3; kH: number; mode: Mode } {
    return { xM: this.pointer, kH: this.kH, mode: this.mode };
  }
}

/** Emits at most `hz` sends per second no matter how fast events arrive. */
export class RateLimiter {
  private nextAt = 0;

  constructor(private intervalMs: number) {}

  static atHz(hz: number): RateLimiter {
    return new RateLimiter(1000 / hz);
  }

  shouldSend(nowMs: number): boolean {
    if (nowMs < this.nextAt) return false;
    this.nextAt = nowMs + this.intervalMs;
    return true;
  }
}
