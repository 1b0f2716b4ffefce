// Top-down 2-D workspace rendering on a canvas. World coordinates are
// meters centered on the reference circle's center (or the origin); screen
// y is flipped. Forces draw as arrows with a fixed N-per-pixel legend.

import type { StateFrame, Vec3 } from "./protocol.js";
import type { SessionView } from "./state.js";

export interface SceneGeometry {
  reference: { kind: string; center?: number[]; radius?: number; period?: number };
  obstacles: { center: number[]; half_extents?: number[]; normal?: number[] }[];
  workspace: number;
  band: number;
  delay: number;
}

const VIEW_HALF_M = 0.22;     // world half-extent shown [m]
const FORCE_SCALE = 250;      // px per N... divided by view scale below
const N_PER_LEGEND = 5;       // legend arrow magnitude [N]

export class WorkspaceRenderer {
  private ctx: CanvasRenderingContext2D;

  constructor(private canvas: HTMLCanvasElement, private scene: SceneGeometry) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  private center(): Vec3 {
    const c = this.scene.reference.center;
    return c ? [c[0], c[1], c[2]] : [0, 0, 0];
  }

  private toPx(x: number, y: number): [number, number] {
    const c = this.center();
    const half = this.canvas.width / 2;
    const s = half / VIEW_HALF_M;
    return [half + (x - c[0]) * s, half - (y - c[1]) * s];
  }

  private scalePx(): number {
    return this.canvas.width / 2 / VIEW_HALF_M;
  }

  draw(view: SessionView): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = "#11151c";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    this.drawReference();
    this.drawObstacles();
    const frame = view.latest;
    if (frame) {
      this.drawBand(frame);
      this.drawSetpoint(frame.x_d);
      this.drawReplica(frame);
      this.drawForce(frame);
      this.drawHud(frame, view);
    }
    if (view.status !== "connected") {
      this.drawBanner(view.status === "connecting" ? "connecting…" : "disconnected — showing last frame");
    }
  }

  private drawReference(): void {
    const ref = this.scene.reference;
    if (ref.kind !== "circle" || !ref.radius) return;
    const { ctx } = this;
    const c = this.center();
    const [cx, cy] = this.toPx(c[0], c[1]);
    ctx.strokeStyle = "#3d5a80";
    ctx.setLineDash([6, 6]);
    ctx.beginPath();
    ctx.arc(cx, cy, ref.radius * this.scalePx(), 0, Math.PI * 2);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  private drawObstacles(): void {
    const { ctx } = this;
    ctx.fillStyle = "#6b4f2a";
    for (const ob of this.scene.obstacles) {
      if (!ob.half_extents) continue; // half-planes are off-screen walls
      const [cx, cy] = this.toPx(ob.center[0], ob.center[1]);
      const s = this.scalePx();
      const w = ob.half_extents[0] * s;
      const h = ob.half_extents[1] * s;
      ctx.fillRect(cx - w, cy - h, 2 * w, 2 * h);
    }
  }

  private drawBand(frame: StateFrame): void {
    const { ctx } = this;
    const [x, y] = this.toPx(frame.x_d[0], frame.x_d[1]);
    ctx.strokeStyle = "rgba(120, 160, 120, 0.35)";
    ctx.beginPath();
    ctx.arc(x, y, this.scene.band * this.scalePx(), 0, Math.PI * 2);
    ctx.stroke();
  }

  private drawSetpoint(xd: Vec3): void {
    const { ctx } = this;
    const [x, y] = this.toPx(xd[0], xd[1]);
    ctx.strokeStyle = "#e0fbfc";
    ctx.beginPath();
    ctx.moveTo(x - 6, y);
    ctx.lineTo(x + 6, y);
    ctx.moveTo(x, y - 6);
    ctx.lineTo(x, y + 6);
    ctx.stroke();
  }

  private drawReplica(frame: StateFrame): void {
    const { ctx } = this;
    const [x, y] = this.toPx(frame.x_r[0], frame.x_r[1]);
    ctx.fillStyle = frame.bond ? "#f4a259" : "#98c1d9";
    ctx.beginPath();
    ctx.arc(x, y, 7, 0, Math.PI * 2);
    ctx.fill();
  }

  private drawForce(frame: StateFrame): void {
    const f = frame.f_r;
    const mag = Math.hypot(f[0], f[1], f[2]);
    if (mag < 1e-6) return;
    const { ctx } = this;
    const [x, y] = this.toPx(frame.x_r[0], frame.x_r[1]);
    const s = FORCE_SCALE / N_PER_LEGEND;
    ctx.strokeStyle = "#ee6c4d";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(x, y);
    ctx.lineTo(x + f[0] * s, y - f[1] * s);
    ctx.stroke();
    ctx.lineWidth = 1;
    ctx.fillStyle = "#ee6c4d";
    ctx.fillText(`${mag.toFixed(1)} N`, x + f[0] * s + 6, y - f[1] * s);
  }

  private drawHud(frame: StateFrame, view: SessionView): void {
    const { ctx } = this;
    const mag = Math.hypot(frame.f_r[0], frame.f_r[1], frame.f_r[2]);
    ctx.fillStyle = "#e0fbfc";
    ctx.font = "13px monospace";
    ctx.fillText(`t      ${frame.t.toFixed(2)} s`, 12, 20);
    ctx.fillText(`delay  ${(frame.delay * 1000).toFixed(0)} ms one-way`, 12, 38);
    ctx.fillText(`|F_R|  ${mag.toFixed(2)} N`, 12, 56);
    ctx.fillText(`bond   ${frame.bond ? "ATTACHED" : "free"}`, 12, 74);
    // force legend
    const s = FORCE_SCALE / N_PER_LEGEND;
    const lx = 12;
    const ly = this.canvas.height - 16;
    ctx.strokeStyle = "#ee6c4d";
    ctx.beginPath();
    ctx.moveTo(lx, ly);
    ctx.lineTo(lx + N_PER_LEGEND * s, ly);
    ctx.stroke();
    ctx.fillText(`${N_PER_LEGEND} N`, lx + N_PER_LEGEND * s + 6, ly + 4);
    // recent events
    const recent = view.events.slice(-4);
    recent.forEach((ev, i) => {
      ctx.fillStyle = "#f4a259";
      ctx.fillText(`${ev.kind} @ ${ev.t.toFixed(1)} s`, 12, 96 + i * 16);
    });
  }

  private drawBanner(text: string): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = "rgba(180, 40, 40, 0.85)";
    ctx.fillRect(0, canvas.height / 2 - 22, canvas.width, 44);
    ctx.fillStyle = "#fff";
    ctx.font = "16px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(text, canvas.width / 2, canvas.height / 2 + 5);
    ctx.textAlign = "left";
  }
}
