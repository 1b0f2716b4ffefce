import { describe, expect, it } from "vitest";

import { InputModel, RateLimiter } from "../src/input.js";
import type { StateFrame } from "../src/protocol.js";
import { SessionView } from "../src/state.js";

function frame(t: number): StateFrame {
  return {
    type: "state_frame",
    t,
    x_r: [0, 0, 0],
    x_d: [0, 0, 0],
    f_r: [0, 0, 0],
    f_master: [0, 0, 0],
    bond: false,
    delay: 0.2,
  };
}

describe("session view", () => {
  it("keeps only the latest frame and drops stale ones", () => {
    const view = new SessionView();
    expect(view.pushFrame(frame(1.0))).toBe(true);
    expect(view.pushFrame(frame(2.0))).toBe(true);
    expect(view.pushFrame(frame(1.5))).toBe(false); // stale: dropped
    expect(view.latest?.t).toBe(2.0);
    expect(view.framesDropped).toBe(1);
  });

  it("bounds the event feed", () => {
    const view = new SessionView();
    for (let i = 0; i < 50; i++) {
      view.pushEvent({ type: "event", kind: "disconnect", t: i });
    }
    expect(view.events.length).toBeLessThanOrEqual(20);
    expect(view.events.at(-1)?.t).toBe(49);
  });
});

describe("input model", () => {
  it("maps pad pixels to meters with y flipped and clamps to the box", () => {
    const input = new InputModel(0.05);
    input.setPointerFromPad(55, -55, 110); // half-way right, half-way up
    expect(input.pointer[0]).toBeCloseTo(0.025, 10);
    expect(input.pointer[1]).toBeCloseTo(0.025, 10);
    input.setPointerFromPad(500, 0, 110); // far beyond the pad edge
    expect(input.pointer[0]).toBe(0.05);
  });

  it("recenters on release but keeps the z offset", () => {
    const input = new InputModel(0.05);
    input.setZ(0.02);
    input.setPointerFromPad(30, 10, 110);
    input.release();
    expect(input.pointer).toEqual([0, 0, 0.02]);
  });

  it("toggles between the two teleoperation modes", () => {
    const input = new InputModel(0.05);
    expect(input.mode).toBe("offset");
    expect(input.toggleMode()).toBe("velocity");
    expect(input.toggleMode()).toBe("offset");
  });

  it("clamps gain and z", () => {
    const input = new InputModel(0.05);
    input.setGain(3);
    expect(input.kH).toBe(1);
    input.setZ(-1);
    expect(input.z).toBe(-0.05);
  });
});

describe("rate limiter", () => {
  it("allows at most the configured rate regardless of call frequency", () => {
    const limiter = RateLimiter.atHz(60);
    let sent = 0;
    for (let now = 0; now < 1000; now += 1) {
      if (limiter.shouldSend(now)) sent += 1; // called at 1 kHz
    }
    expect(sent).toBeLessThanOrEqual(60);
    expect(sent).toBeGreaterThanOrEqual(55);
  });
});
