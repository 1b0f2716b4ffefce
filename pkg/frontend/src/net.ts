// WebSocket client with line re-assembly and automatic reconnect.
// The socket factory is injectable so the reconnect logic is testable
// without a browser.

import { parseServerLine, splitLines, type ServerMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientCallbacks {
  onMessage: (msg: ServerMessage) => void;
  onStatus: (connected: boolean) => void;
  onParseError?: (detail: string) => void;
}

const RECONNECT_BASE_MS = 500;
const RECONNECT_MAX_MS = 5000;

export class SocketClient {
  private socket: SocketLike | null = null;
  private buffer = "";
  private attempts = 0;
  private closed = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    private callbacks: ClientCallbacks,
    private factory: SocketFactory = (u) => new WebSocket(u) as unknown as SocketLike,
  ) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const sock = this.factory(this.url);
    this.socket = sock;
    this.buffer = "";
    sock.onopen = () => {
      this.attempts = 0;
      this.callbacks.onStatus(true);
    };
    sock.onmessage = (ev) => this.feed(ev.data);
    sock.onerror = () => {
      /* close follows; reconnect handled there */
    };
    sock.onclose = () => {
      this.callbacks.onStatus(false);
      this.scheduleReconnect();
    };
  }

  /** Re-assemble NDJSON lines across message boundaries and dispatch. */
  feed(chunk: string): void {
    const { lines, rest } = splitLines(this.buffer, chunk);
    this.buffer = rest;
    // a bare JSON object per frame (no trailing newline) is also accepted
    if (this.buffer.trim().startsWith("{") && this.buffer.trim().endsWith("}")) {
      lines.push(this.buffer);
      this.buffer = "";
    }
    for (const line of lines) {
      try {
        const msg = parseServerLine(line);
        if (msg) this.callbacks.onMessage(msg);
      } catch (err) {
        this.callbacks.onParseError?.(String(err));
      }
    }
  }

  reconnectDelay(): number {
    return Math.min(RECONNECT_MAX_MS, RECONNECT_BASE_MS * 2 ** this.attempts);
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    const delay = this.reconnectDelay();
    this.attempts += 1;
    this.timer = setTimeout(() => this.open(), delay);
  }

  send(line: string): void {
    try {
      this.socket?.send(line);
    } catch {
      /* disconnected; input resumes after reconnect */
    }
  }

  close(): void {
    this.closed = true;
    if (this.timer) clearTimeout(this.timer);
    this.socket?.close();
  }
}
