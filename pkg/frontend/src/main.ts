// Operator console wiring: scene fetch, socket, input devices, render loop.

import { InputModel, RateLimiter } from "./input.js";
import { SocketClient } from "./net.js";
import { encodeOperatorInput } from "./protocol.js";
import { WorkspaceRenderer, type SceneGeometry } from "./render.js";
import { SessionView } from "./state.js";

const SEND_HZ = 60;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

async function fetchScene(): Promise<SceneGeometry> {
  try {
    const res = await fetch("/scene");
    if (res.ok) return (await res.json()) as SceneGeometry;
  } catch {
    /* fall through to defaults (e.g. replay without scene info) */
  }
  return { reference: { kind: "none" }, obstacles: [], workspace: 0.05, band: 0.05, delay: 0 };
}

async function start(): Promise<void> {
  const scene = await fetchScene();
  const view = new SessionView();
  const input = new InputModel(scene.workspace);

  const canvas = el<HTMLCanvasElement>("workspace");
  const pad = el<HTMLDivElement>("pad");
  const padKnob = el<HTMLDivElement>("pad-knob");
  const gain = el<HTMLInputElement>("gain");
  const zSlider = el<HTMLInputElement>("zaxis");
  const modeButton = el<HTMLButtonElement>("mode");
  const statusLine = el<HTMLDivElement>("status");
  const renderer = new WorkspaceRenderer(canvas, scene);

  const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
  const client = new SocketClient(url, {
    onMessage: (msg) => {
      if (msg.type === "state_frame") view.pushFrame(msg);
      else if (msg.type === "event") view.pushEvent(msg);
      else view.setError(msg.message);
    },
    onStatus: (up) => view.setStatus(up ? "connected" : "disconnected"),
    onParseError: (detail) => view.setError(detail),
  });
  client.connect();

  // --- pointer pad -> x_M
  const padHalf = pad.clientWidth / 2;
  const updateKnob = () => {
    const s = padHalf / input.workspaceLimit;
    padKnob.style.transform =
      `translate(${input.pointer[0] * s}px, ${-input.pointer[1] * s}px)`;
  };
  const track = (ev: PointerEvent) => {
    const rect = pad.getBoundingClientRect();
    const dx = ev.clientX - (rect.left + rect.width / 2);
    const dy = ev.clientY - (rect.top + rect.height / 2);
    input.setPointerFromPad(dx, dy, padHalf);
    updateKnob();
  };
  pad.addEventListener("pointerdown", (ev) => {
    input.engaged = true;
    pad.setPointerCapture(ev.pointerId);
    track(ev);
  });
  pad.addEventListener("pointermove", (ev) => {
    if (input.engaged) track(ev);
  });
  const disengage = () => {
    input.release();
    updateKnob();
  };
  pad.addEventListener("pointerup", disengage);
  pad.addEventListener("pointercancel", disengage);

  gain.addEventListener("input", () => input.setGain(Number(gain.value)));
  zSlider.addEventListener("input", () =>
    input.setZ(Number(zSlider.value) * input.workspaceLimit));
  const refreshModeLabel = () => {
    modeButton.textContent = `mode: ${input.mode} (M)`;
  };
  modeButton.addEventListener("click", () => {
    input.toggleMode();
    refreshModeLabel();
  });
  window.addEventListener("keydown", (ev) => {
    if (ev.key === "m" || ev.key === "M") {
      input.toggleMode();
      refreshModeLabel();
    }
  });
  refreshModeLabel();

  // --- fixed-rate input stream (rate-limited regardless of event rate)
  const limiter = RateLimiter.atHz(SEND_HZ);
  setInterval(() => {
    if (!limiter.shouldSend(performance.now())) return;
    const { xM, kH, mode } = input.current();
    const t = view.latest ? view.latest.t : 0;
    client.send(encodeOperatorInput(t, xM, kH, mode, input.workspaceLimit));
  }, 1000 / SEND_HZ);

  // --- render loop
  const render = () => {
    renderer.draw(view);
    statusLine.textContent =
      `${view.status} | frames ${view.framesReceived} | ` +
      `K_H ${input.kH.toFixed(2)} | ${view.lastError}`;
    requestAnimationFrame(render);
  };
  requestAnimationFrame(render);
}

window.addEventListener("load", () => void start());
