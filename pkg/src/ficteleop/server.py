"""Live-session and replay servers.

The simulation advances in its own thread, paced by wall clock, stepping the
same deterministic core used for scripted runs. Session I/O talks to it only
through two hand-off points: the latest operator input (written by the socket
side, read at each tick) and an append-only list of outbound frame lines
(written by the simulation, streamed by the socket side). The simulation
never blocks on I/O; a client disconnect simply leaves the last-held input
in place.
"""

from __future__ import annotations

import threading
import time

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from . import protocol
from .logio import RunLog
from .scenario import ScenarioConfig, SimulationCore


class LiveSession:
    """Wall-clock-paced simulation with a single shared operator input."""

    def __init__(self, cfg: ScenarioConfig, pace: float = 1.0, decimation: int = 60):
        self.core = SimulationCore(cfg)
        self.pace = pace
        self.delay = cfg.link["delay"]
        self.x_m_limit = cfg.master_fic.x_b
        # one frame line every `stride` ticks (default 60 Hz at 1 kHz)
        self.stride = max(1, round(cfg.rate / decimation))
        self.frames: list[str] = []   # append-only; readers track their index
        self.rows: list[list] = []
        self.held_input = ((0.0, 0.0, 0.0), 0.0, "offset")
        self.clients = 0
        self.done = False
        self.aborted: str | None = None
        self._thread = threading.Thread(target=self._run, daemon=True)

    def start(self) -> None:
        self._thread.start()

    def submit_input(self, x_m, k_h, mode) -> None:
        self.held_input = (x_m, k_h, mode)  # single attribute swap: atomic

    def _run(self) -> None:
        core = self.core
        dt = core.dt
        t0 = time.monotonic()
        for k in range(core.n_ticks):
            if self.pace > 0:
                target = t0 + k * dt / self.pace
                lag = target - time.monotonic()
                if lag > 0:
                    time.sleep(lag)
            x_m, k_h, mode = self.held_input
            try:
                row = core.tick(x_m, k_h, mode)
            except Exception as exc:  # plant divergence: stop, report, stay up
                self.aborted = str(exc)
                break
            self.rows.append(row)
            for ev in core.pending_events:
                self.frames.append(protocol.event(ev["kind"], ev["t"]))
            core.pending_events.clear()
            if k % self.stride == 0:
                self.frames.append(protocol.state_frame(
                    t=row[0],
                    x_r=row[10:13],
                    x_d=row[1:4],
                    f_r=row[19:22],
                    f_master=core.f_master,
                    bond=row[22] == 1.0,
                    delay=self.delay,
                ))
        self.done = True

    def log(self) -> RunLog:
        import numpy as np

        from .logio import COLUMNS

        data = np.array(self.rows, dtype=float).reshape(len(self.rows), 28)
        meta = self.core.meta(reproducible=False)
        return RunLog(meta=meta, data=data)


def create_app(cfg: ScenarioConfig, static_dir=None, pace: float = 1.0,
               decimation: int = 60) -> FastAPI:
    """Live operator session: one simulation shared by all socket clients."""
    session = LiveSession(cfg, pace=pace, decimation=decimation)
    app = FastAPI()
    app.state.session = session
    session.start()

    @app.get("/health")
    def health():
        return {
            "status": "aborted" if session.aborted else ("done" if session.done else "running"),
            "tick": session.core.tick_index,
            "clients": session.clients,
            "detail": session.aborted,
        }

    @app.get("/scene")
    def scene():
        ref = cfg.reference
        serializable_ref = dict(ref)
        if "center" in serializable_ref:
            serializable_ref["center"] = list(serializable_ref["center"])
        obstacles = []
        for ob in cfg.obstacles:
            if ob.normal is not None:
                obstacles.append({"center": list(ob.center), "normal": list(ob.normal)})
            else:
                obstacles.append({"center": list(ob.center),
                                  "half_extents": list(ob.half_extents)})
        return {
            "reference": serializable_ref,
            "obstacles": obstacles,
            "workspace": cfg.master_fic.x_b,
            "band": cfg.replica_fic.x_b,
            "delay": cfg.link["delay"],
            "rate": cfg.rate,
            "duration": cfg.duration,
        }

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        import asyncio

        await ws.accept()
        session.clients += 1
        cursor = len(session.frames)  # stream from now, not from history

        async def pump_frames():
            nonlocal cursor
            while True:
                frames = session.frames
                while cursor < len(frames):
                    await ws.send_text(frames[cursor])
                    cursor += 1
                if session.done and cursor >= len(frames):
                    return
                await asyncio.sleep(0.01)

        pump = asyncio.create_task(pump_frames())
        try:
            while True:
                line = await ws.receive_text()
                try:
                    obj = protocol.parse_line(line)
                    if obj["type"] == "operator_input":
                        x_m, k_h, mode = protocol.parse_operator_input(
                            obj, session.x_m_limit)
                        session.submit_input(x_m, k_h, mode)
                    else:
                        await ws.send_text(protocol.error(
                            f"unknown message type: {obj['type']!r}"))
                except protocol.ProtocolError as exc:
                    await ws.send_text(protocol.error(str(exc)))
        except WebSocketDisconnect:
            pass  # simulation keeps running with the last-held input
        finally:
            session.clients -= 1
            pump.cancel()

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def create_replay_app(log: RunLog, pace: float = 1.0, decimation: int = 60,
                      static_dir=None) -> FastAPI:
    """Stream the state frames of a recorded run over the same socket."""
    rate = int(log.meta.get("rate", 1000))
    delay = float(log.meta.get("delay", 0.0))
    stride = max(1, round(rate / decimation))
    frames = [
        protocol.state_frame(
            t=float(row[0]),
            x_r=row[10:13],
            x_d=row[1:4],
            f_r=row[19:22],
            f_master=(0.0, 0.0, 0.0),
            bond=row[22] == 1.0,
            delay=delay,
        )
        for row in log.data[::stride]
    ]
    app = FastAPI()

    @app.get("/health")
    def health():
        return {"status": "replay", "frames": len(frames)}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        import asyncio

        await ws.accept()
        interval = stride / rate / pace if pace > 0 else 0.0
        try:
            for line in frames:
                await ws.send_text(line)
                if interval:
                    await asyncio.sleep(interval)
        except WebSocketDisconnect:
            pass

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
