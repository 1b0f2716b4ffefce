// Session view-model: latest frame wins, stale frames are dropped, and a
// bounded event feed records link/bond happenings for the operator.

import type { EventMsg, StateFrame } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

const EVENT_FEED_LIMIT = 20;

export class SessionView {
  latest: StateFrame | null = null;
  status: ConnectionStatus = "connecting";
  events: EventMsg[] = [];
  lastError = "";
  framesReceived = 0;
  framesDropped = 0;

  /** Returns true when the frame became the displayed one. */
  pushFrame(frame: StateFrame): boolean {
    this.framesReceived += 1;
    if (this.latest && frame.t < this.latest.t) {
      this.framesDropped += 1; // out-of-order remnant: keep the newer view
      return false;
    }
    this.latest = frame;
    return true;
  }

  pushEvent(ev: EventMsg): void {
    this.events.push(ev);
    if (this.events.length > EVENT_FEED_LIMIT) {
      this.events.splice(0, this.events.length - EVENT_FEED_LIMIT);
    }
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
  }

  setError(message: string): void {
    this.lastError = message;
  }
}
