"""Scenario configuration and the deterministic closed-loop harness.

A scenario wires the full architecture together at a single fixed rate:
scripted (or live) operator input feeds the master controller, the teleop
setpoint crosses the delayed channel, the replica superimposes it onto the
planner output and tracks the sum through the impedance law, and the plant
integrates the commanded torque together with contact and bond forces.
Channel deliveries snap to tick boundaries, so a run is a pure function of
(config, seed).
"""

from __future__ import annotations

import hashlib
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .channel import DelayChannel, LinkConfig
from .controllers import (
    OFFSET,
    VELOCITY,
    AxisFic,
    SetpointTracker,
    haptic_gain,
    master_force,
    replica_torque,
)
from .fic import FicParams
from .logio import COLUMNS, RunLog
from .planner import Planner, PlannerParams
from .plant import (
    BondState,
    Obstacle,
    PlantDiverged,
    PlantState,
    PointMass,
    TwoLink,
    bond_force,
    contact_forces,
    ee_velocity,
    forward_kinematics,
    step_dynamics,
)

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Configuration rejected before execution."""


class ScenarioAborted(RuntimeError):
    """Plant diverged mid-run; carries the partial log for post-mortem."""

    def __init__(self, message: str, tick: int, log: RunLog):
        super().__init__(message)
        self.tick = tick
        self.log = log


@dataclass(frozen=True)
class TeleopCommand:
    t: float
    x_prime_d: tuple


@dataclass(frozen=True)
class StateFrame:
    t: float
    x_r: tuple
    f_r: tuple


def circle_reference(t: float, center, radius: float, period: float):
    """Parametric circle in the x-y plane starting at +x."""
    if period <= 0:
        raise ValueError(f"period must be positive, got {period}")
    w = 2.0 * math.pi * t / period
    return (center[0] + radius * math.cos(w), center[1] + radius * math.sin(w), center[2])


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ScenarioError(msg)


def _vec3(v, what: str):
    _require(isinstance(v, (list, tuple)) and len(v) == 3, f"{what} must be a 3-vector")
    out = tuple(float(c) for c in v)
    _require(all(math.isfinite(c) for c in out), f"{what} must be finite")
    return out


@dataclass
class ScenarioConfig:
    raw: dict

    # populated by validate()
    duration: float = 0.0
    rate: int = 0
    seed: int = 0
    plant_kind: str = "point_mass"
    model: object = None
    q0: list = field(default_factory=list)
    q_dot0: list = field(default_factory=list)
    replica_fic: FicParams = None
    master_fic: FicParams = None
    planner: PlannerParams = None
    link: dict = field(default_factory=dict)
    reference: dict = field(default_factory=dict)
    operator: dict = field(default_factory=dict)
    obstacles: list = field(default_factory=list)
    bond: dict = field(default_factory=dict)
    events: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        cfg = cls(raw=d)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(d)

    def validate(self) -> None:
        d = self.raw
        _require(isinstance(d, dict), "scenario must be a JSON object")
        _require(d.get("schema_version") == SCHEMA_VERSION,
                 f"schema_version must be {SCHEMA_VERSION}")

        self.duration = float(d.get("duration", 10.0))
        _require(self.duration > 0, "duration must be positive")
        self.rate = int(d.get("rate", 1000))
        _require(100 <= self.rate <= 10_000, "rate must lie in [100, 10000] Hz")
        self.seed = int(d.get("seed", 0))

        plant = d.get("plant", {"kind": "point_mass"})
        self.plant_kind = plant.get("kind", "point_mass")
        if self.plant_kind == "point_mass":
            self.model = PointMass(mass=float(plant.get("mass", 1.0)),
                                   damping=float(plant.get("damping", 0.0)))
            self.q0 = list(_vec3(plant.get("q0", [0.0, 0.0, 0.0]), "plant.q0"))
            self.q_dot0 = list(_vec3(plant.get("q_dot0", [0.0, 0.0, 0.0]), "plant.q_dot0"))
        elif self.plant_kind == "two_link":
            kw = {k: float(plant[k]) for k in
                  ("m1", "m2", "l1", "l2", "lc1", "lc2", "i1", "i2", "gravity",
                   "joint_damping")
                  if k in plant}
            self.model = TwoLink(**kw)
            q0 = plant.get("q0", [0.7, 1.2])
            _require(len(q0) == 2, "two_link q0 must have 2 joints")
            self.q0 = [float(c) for c in q0]
            self.q_dot0 = [float(c) for c in plant.get("q_dot0", [0.0, 0.0])]
            _require(len(self.q_dot0) == 2, "two_link q_dot0 must have 2 joints")
        else:
            raise ScenarioError(f"unknown plant kind: {self.plant_kind!r}")

        def fic_from(key: str, defaults: dict) -> FicParams:
            sub = {**defaults, **d.get(key, {})}
            try:
                return FicParams(k0=float(sub["k0"]), x_b=float(sub["x_b"]),
                                 f_max=float(sub["f_max"]), xi=float(sub["xi"]))
            except ValueError as exc:
                raise ScenarioError(f"{key}: {exc}") from exc

        self.replica_fic = fic_from("replica_fic",
                                    {"k0": 200.0, "x_b": 0.05, "f_max": 20.0, "xi": 0.9})
        self.master_fic = fic_from("master_fic",
                                   {"k0": 100.0, "x_b": 0.05, "f_max": 5.0, "xi": 0.9})

        pl = d.get("planner", {})
        try:
            self.planner = PlannerParams(omega_n=float(pl.get("omega_n", 4.0)),
                                         v_d=float(pl.get("v_d", 0.2)))
        except ValueError as exc:
            raise ScenarioError(f"planner: {exc}") from exc

        link = d.get("link", {})
        try:
            LinkConfig(delay=float(link.get("delay", 0.0)),
                       jitter=float(link.get("jitter", 0.0)),
                       drop_prob=float(link.get("drop_prob", 0.0)))
        except ValueError as exc:
            raise ScenarioError(f"link: {exc}") from exc
        self.link = {"delay": float(link.get("delay", 0.0)),
                     "jitter": float(link.get("jitter", 0.0)),
                     "drop_prob": float(link.get("drop_prob", 0.0)),
                     "ordered": bool(link.get("ordered", True))}

        ref = d.get("reference", {"kind": "none"})
        kind = ref.get("kind", "none")
        if kind == "circle":
            self.reference = {
                "kind": "circle",
                "center": _vec3(ref.get("center", [0.0, 0.0, 0.0]), "reference.center"),
                "radius": float(ref["radius"]),
                "period": float(ref["period"]),
            }
            _require(self.reference["radius"] > 0, "circle radius must be positive")
            _require(self.reference["period"] > 0, "circle period must be positive")
        elif kind == "waypoints":
            pts = ref.get("points", [])
            _require(len(pts) >= 1, "waypoints reference needs at least one point")
            parsed = [{"t": float(p["t"]), "x": _vec3(p["x"], "waypoint.x")} for p in pts]
            _require(all(b["t"] > a["t"] for a, b in zip(parsed, parsed[1:])),
                     "waypoint times must be strictly increasing")
            self.reference = {"kind": "waypoints", "points": parsed}
        elif kind == "none":
            self.reference = {"kind": "none"}
        else:
            raise ScenarioError(f"unknown reference kind: {kind!r}")

        op = d.get("operator", {"source": "scripted", "trace": []})
        source = op.get("source", "scripted")
        _require(source in ("scripted", "live"), f"unknown operator source: {source!r}")
        trace = []
        if source == "scripted":
            for row in op.get("trace", []):
                _require(isinstance(row, (list, tuple)) and len(row) == 6,
                         "trace rows must be [t, x, y, z, k_h, mode]")
                t, x, y, z, kh, mode = row
                _require(mode in (OFFSET, VELOCITY), f"unknown trace mode: {mode!r}")
                trace.append((float(t), float(x), float(y), float(z), float(kh), mode))
            _require(all(b[0] > a[0] for a, b in zip(trace, trace[1:])),
                     "trace times must be strictly increasing")
        self.operator = {"source": source, "trace": trace}

        self.obstacles = []
        for i, ob in enumerate(d.get("obstacles", [])):
            try:
                if "normal" in ob and ob["normal"] is not None:
                    self.obstacles.append(Obstacle(
                        center=_vec3(ob.get("center", [0, 0, 0]), "obstacle.center"),
                        normal=_vec3(ob["normal"], "obstacle.normal"),
                        k_c=float(ob.get("k_c", 5000.0)),
                        d_c=float(ob.get("d_c", 50.0))))
                else:
                    self.obstacles.append(Obstacle(
                        center=_vec3(ob.get("center", [0, 0, 0]), "obstacle.center"),
                        half_extents=_vec3(ob.get("half_extents", [0.01, 0.01, 0.01]),
                                           "obstacle.half_extents"),
                        k_c=float(ob.get("k_c", 5000.0)),
                        d_c=float(ob.get("d_c", 50.0))))
            except ValueError as exc:
                raise ScenarioError(f"obstacles[{i}]: {exc}") from exc

        bond = d.get("bond", {})
        self.bond = {
            "attached": bool(bond.get("attached", False)),
            "anchor": None if bond.get("anchor") is None else _vec3(bond["anchor"], "bond.anchor"),
            "k_v": float(bond.get("k_v", 5000.0)),
            "f_break": float(bond.get("f_break", 15.0)),
        }
        _require(self.bond["k_v"] > 0, "bond.k_v must be positive")
        _require(self.bond["f_break"] > 0, "bond.f_break must be positive")

        self.events = []
        last_t = -math.inf
        for i, ev in enumerate(d.get("events", [])):
            kind = ev.get("kind")
            _require(kind in ("disconnect", "reconnect", "bond_rearm"),
                     f"events[{i}]: unknown kind {kind!r}")
            t = float(ev["t"])
            _require(t >= last_t, "event times must be non-decreasing")
            last_t = t
            link_side = ev.get("link", "both")
            _require(link_side in ("m2r", "r2m", "both"), f"events[{i}]: bad link {link_side!r}")
            parsed = {"kind": kind, "t": t, "link": link_side}
            if kind == "bond_rearm":
                parsed["anchor"] = (None if ev.get("anchor") is None
                                    else _vec3(ev["anchor"], "event.anchor"))
            self.events.append(parsed)

    def config_hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


class _Trace:
    """Scripted operator rows, linearly interpolated (mode is a step function)."""

    def __init__(self, rows):
        self.ts = [r[0] for r in rows]
        self.rows = rows

    def at(self, t: float):
        if not self.rows:
            return (0.0, 0.0, 0.0), 0.0, OFFSET
        i = bisect_right(self.ts, t) - 1
        if i < 0:
            r = self.rows[0]
            return (r[1], r[2], r[3]), r[4], r[5]
        if i >= len(self.rows) - 1:
            r = self.rows[-1]
            return (r[1], r[2], r[3]), r[4], r[5]
        a, b = self.rows[i], self.rows[i + 1]
        w = (t - a[0]) / (b[0] - a[0])
        x_m = (a[1] + w * (b[1] - a[1]), a[2] + w * (b[2] - a[2]), a[3] + w * (b[3] - a[3]))
        return x_m, a[4] + w * (b[4] - a[4]), a[5]


class SimulationCore:
    """Tick-stepped closed loop shared by scripted runs and the live server."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.dt = 1.0 / cfg.rate
        self.n_ticks = round(cfg.duration * cfg.rate)
        self.model = cfg.model
        self.state = PlantState(q=list(cfg.q0), q_dot=list(cfg.q_dot0))

        x0 = forward_kinematics(self.model, self.state.q)
        anchor = cfg.bond["anchor"] if cfg.bond["anchor"] is not None else x0
        self.state.bond = BondState(attached=cfg.bond["attached"], anchor=anchor,
                                    k_v=cfg.bond["k_v"], f_break=cfg.bond["f_break"])

        self.master_fic = AxisFic(cfg.master_fic)
        self.replica_fic = AxisFic(cfg.replica_fic)
        self.tracker = SetpointTracker()
        self.planner = Planner(cfg.planner, list(x0))

        link = cfg.link
        self.m2r = DelayChannel(LinkConfig(delay=link["delay"], jitter=link["jitter"],
                                           drop_prob=link["drop_prob"], seed=cfg.seed + 1,
                                           ordered=link["ordered"]))
        self.r2m = DelayChannel(LinkConfig(delay=link["delay"], jitter=link["jitter"],
                                           drop_prob=link["drop_prob"], seed=cfg.seed + 2,
                                           ordered=link["ordered"]))
        self._register_link_events()

        self.trace = _Trace(cfg.operator["trace"])
        self.obstacles = list(cfg.obstacles)

        ref = cfg.reference
        self.ref = ref
        if ref["kind"] == "circle":
            self.planner.set_target(circle_reference(0.0, ref["center"],
                                                     ref["radius"], ref["period"]))
        elif ref["kind"] == "waypoints":
            self.planner.set_target(ref["points"][0]["x"])
            self._wp_idx = 0
        else:
            self.planner.set_target(x0)

        self._rearms = [e for e in cfg.events if e["kind"] == "bond_rearm"]
        self._rearm_idx = 0

        # live-visible side state
        self.xpd_held = (0.0, 0.0, 0.0)
        self.f_r_held = (0.0, 0.0, 0.0)
        self.f_master = (0.0, 0.0, 0.0)
        self.tick_index = 0
        self.pending_events: list[dict] = []  # bond_break etc. for the live feed
        self._link_markers = sorted(
            (e["t"], e["kind"]) for e in cfg.events if e["kind"] in ("disconnect", "reconnect")
        )
        self._marker_idx = 0

    def _register_link_events(self) -> None:
        opened = {"m2r": None, "r2m": None}
        windows = {"m2r": [], "r2m": []}
        for ev in self.cfg.events:
            if ev["kind"] not in ("disconnect", "reconnect"):
                continue
            sides = ("m2r", "r2m") if ev["link"] == "both" else (ev["link"],)
            for side in sides:
                if ev["kind"] == "disconnect":
                    if opened[side] is not None:
                        raise ScenarioError(f"{side}: disconnect while already down")
                    opened[side] = ev["t"]
                else:
                    if opened[side] is None:
                        raise ScenarioError(f"{side}: reconnect without prior disconnect")
                    windows[side].append((opened[side], ev["t"]))
                    opened[side] = None
        for side, open_t in opened.items():
            if open_t is not None:
                windows[side].append((open_t, None))
        for t0, t1 in windows["m2r"]:
            self.m2r.set_link_state(t0, t1)
        for t0, t1 in windows["r2m"]:
            self.r2m.set_link_state(t0, t1)

    def reference_at(self, t: float):
        ref = self.ref
        if ref["kind"] == "circle":
            return circle_reference(t, ref["center"], ref["radius"], ref["period"])
        if ref["kind"] == "waypoints":
            pts = ref["points"]
            while self._wp_idx + 1 < len(pts) and t >= pts[self._wp_idx + 1]["t"]:
                self._wp_idx += 1
                self.planner.set_target(pts[self._wp_idx]["x"])
            return pts[self._wp_idx]["x"]
        return tuple(self.planner.x)  # hold

    def tick(self, x_m, k_h_raw: float, mode: str) -> list:
        """One closed-loop step; returns the log row."""
        k = self.tick_index
        t = k * self.dt
        dt = self.dt
        st = self.state

        # scheduled bond re-arms
        while self._rearm_idx < len(self._rearms) and self._rearms[self._rearm_idx]["t"] <= t:
            ev = self._rearms[self._rearm_idx]
            anchor = ev["anchor"]
            if anchor is None:
                anchor = forward_kinematics(self.model, st.q)
            st.bond.attached = True
            st.bond.anchor = anchor
            self._rearm_idx += 1

        while (self._marker_idx < len(self._link_markers)
               and self._link_markers[self._marker_idx][0] <= t):
            self.pending_events.append(
                {"kind": self._link_markers[self._marker_idx][1], "t": t})
            self._marker_idx += 1

        # master side
        k_h = haptic_gain(k_h_raw)
        for env in self.r2m.poll(t):
            self.f_r_held = env.payload.f_r
        self.f_master = master_force(x_m, self.f_r_held, k_h, self.master_fic)
        xpd = self.tracker.update(mode, x_m, dt)
        self.m2r.send(TeleopCommand(t, xpd), t)

        # replica side
        for env in self.m2r.poll(t):
            self.xpd_held = env.payload.x_prime_d
        x_t = self.reference_at(t)
        self.planner.step(x_t, dt)
        xpp = self.planner.x
        xpd_h = self.xpd_held
        x_d = (xpd_h[0] + xpp[0], xpd_h[1] + xpp[1], xpd_h[2] + xpp[2])

        tau, f_task, x_r, err = replica_torque(self.model, st.q, st.q_dot, x_d,
                                               self.replica_fic)
        x_dot = ee_velocity(self.model, st.q, st.q_dot)
        f_contact = contact_forces(x_r, x_dot, self.obstacles)
        was_attached = st.bond.attached
        f_bond = bond_force(x_r, st.bond)
        if was_attached and not st.bond.attached:
            self.pending_events.append({"kind": "bond_break", "t": t})
        f_ext = (f_contact[0] + f_bond[0], f_contact[1] + f_bond[1],
                 f_contact[2] + f_bond[2])
        self.r2m.send(StateFrame(t, x_r, f_ext), t)

        phases = self.replica_fic.phases()
        row = [
            t,
            x_d[0], x_d[1], x_d[2],
            xpd_h[0], xpd_h[1], xpd_h[2],
            xpp[0], xpp[1], xpp[2],
            x_r[0], x_r[1], x_r[2],
            err[0], err[1], err[2],
            f_task[0], f_task[1], f_task[2],
            f_ext[0], f_ext[1], f_ext[2],
            1.0 if st.bond.attached else 0.0,
            float(phases[0].value), float(phases[1].value), float(phases[2].value),
            float(self.m2r.stats.in_flight()), float(self.r2m.stats.in_flight()),
        ]

        step_dynamics(self.model, st, tau, f_ext, dt)
        self.tick_index = k + 1
        return row

    def meta(self, reproducible: bool) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config_hash": self.cfg.config_hash(),
            "seed": self.cfg.seed,
            "version": __version__,
            "rate": self.cfg.rate,
            "duration": self.cfg.duration,
            "x_b": self.cfg.replica_fic.x_b,
            "f_max": self.cfg.replica_fic.f_max,
            "reproducible": reproducible,
        }


def run_scenario(cfg: ScenarioConfig) -> RunLog:
    """Execute a scripted scenario to completion; deterministic per seed."""
    if cfg.operator["source"] != "scripted":
        raise ScenarioError("run_scenario requires a scripted operator "
                            "(use the live server for interactive sessions)")
    core = SimulationCore(cfg)
    rows = []
    for k in range(core.n_ticks):
        x_m, k_h, mode = core.trace.at(k * core.dt)
        try:
            rows.append(core.tick(x_m, k_h, mode))
        except PlantDiverged as exc:
            partial = RunLog(meta=core.meta(reproducible=True),
                             data=np.array(rows, dtype=float).reshape(len(rows), len(COLUMNS)))
            raise ScenarioAborted(f"plant diverged at tick {k}: {exc}", tick=k,
                                  log=partial) from exc
    data = np.array(rows, dtype=float).reshape(len(rows), len(COLUMNS))
    return RunLog(meta=core.meta(reproducible=True), data=data)
