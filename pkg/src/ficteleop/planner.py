"""Harmonic trajectory planner with bounded velocity and acceleration.

Generates the autonomous setpoint stream x''_d. Each axis runs the same
divergence/convergence rhythm as the impedance spring, but on the planner
error (target minus setpoint): while the error grows the setpoint is pushed
by a saturated harmonic acceleration sign(e)*min(omega_n^2*|e|, a_max); once
the error starts shrinking the peak displacement is latched and the
acceleration follows a linear law that crosses zero at half the peak, so the
setpoint arrives at the target with zero velocity like half a cosine.

A new movement command sizes the acceleration ceiling from the commanded
distance d and the desired tangential speed:

    v_max = v_p * min(v_d, omega_n*|d|),   a_max = 2*d*(v_max/|d|)^2

with v_p = 1.595, which makes the nominal harmonic peak speed v_max while
the hard per-axis velocity clamp stays at v_d. The viscosity mu = 0.01*omega_n
bleeds residual oscillation energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fic import PHASE_EPS, Phase

V_P = 1.595  # harmonic peak-speed factor


@dataclass(frozen=True)
class PlannerParams:
    omega_n: float  # natural frequency [rad/s]
    v_d: float      # desired tangential speed [m/s]

    def __post_init__(self) -> None:
        if not (self.omega_n > 0 and math.isfinite(self.omega_n)):
            raise ValueError(f"omega_n must be positive, got {self.omega_n}")
        if not (self.v_d > 0 and math.isfinite(self.v_d)):
            raise ValueError(f"v_d must be positive, got {self.v_d}")

    @property
    def mu(self) -> float:
        """Viscosity [1/s]."""
        return 0.01 * self.omega_n


@dataclass
class _Axis:
    """Phase memory for one planner axis."""

    phase: Phase = Phase.DIVERGENCE
    prev_err: float = 0.0
    running_max: float = 0.0
    x_t0: float = 0.0       # signed peak error latched at the D->C switch [m]
    a_peak: float = 0.0     # acceleration magnitude at the latch [m/s^2]
    target_at_switch: float = 0.0


@dataclass
class Planner:
    """Multi-axis setpoint generator; step() advances one control tick."""

    params: PlannerParams
    x: list[float]                      # setpoint x''_d [m]
    v: list[float] = field(default=None)  # setpoint rate [m/s]
    a_max: list[float] = field(default=None)  # per-axis accel limit [m/s^2]
    v_max: float = 0.0
    v_limit: float = 0.0
    d_vec: list[float] = field(default=None)
    axes: list[_Axis] = field(default=None)
    acc_cmd: list[float] = field(default=None)  # last undamped accel per axis

    def __post_init__(self) -> None:
        n = len(self.x)
        self.x = [float(c) for c in self.x]
        if self.v is None:
            self.v = [0.0] * n
        if self.a_max is None:
            self.a_max = [0.0] * n
        if self.d_vec is None:
            self.d_vec = [0.0] * n
        if self.axes is None:
            self.axes = [_Axis(prev_err=0.0) for _ in range(n)]
        if self.acc_cmd is None:
            self.acc_cmd = [0.0] * n
        if self.v_limit == 0.0:
            self.v_limit = self.params.v_d

    def set_target(self, x_t, v_d: float | None = None) -> None:
        """Issue a movement command and size the acceleration envelope."""
        if any(not math.isfinite(c) for c in x_t):
            raise ValueError(f"target must be finite, got {x_t}")
        v_d = self.params.v_d if v_d is None else v_d
        d = [t - c for t, c in zip(x_t, self.x)]
        dist = math.sqrt(sum(c * c for c in d))
        self.d_vec = d
        self.v_limit = v_d
        if dist == 0.0:
            # zero-distance command: hold position
            self.v_max = 0.0
            self.a_max = [0.0] * len(self.x)
        else:
            self.v_max = V_P * min(v_d, self.params.omega_n * dist)
            scale = 2.0 * (self.v_max / dist) ** 2
            self.a_max = [c * scale for c in d]
        for i, ax in enumerate(self.axes):
            ax.phase = Phase.DIVERGENCE
            ax.prev_err = x_t[i] - self.x[i]
            ax.running_max = abs(ax.prev_err)
            ax.x_t0 = 0.0
            ax.a_peak = 0.0
            ax.target_at_switch = x_t[i]

    def step(self, x_t, dt: float) -> None:
        """Advance the setpoint one tick toward the (possibly moving) target.

        Every trajectory point counts as a freshly issued command, so the
        velocity/acceleration envelope is re-derived from the current
        distance vector; a command envelope frozen at set_target time would
        starve any axis orthogonal to the original motion direction.
        """
        if not (0.0 < dt <= 0.01):
            raise ValueError(f"dt must lie in (0, 0.01], got {dt}")
        if any(not math.isfinite(c) for c in x_t):
            raise ValueError(f"target must be finite, got {x_t}")
        p = self.params
        mu = p.mu
        omg2 = p.omega_n * p.omega_n

        d = [t - c for t, c in zip(x_t, self.x)]
        dist = math.sqrt(sum(c * c for c in d))
        self.d_vec = d
        if dist == 0.0:
            self.v_max = 0.0
            self.a_max = [0.0] * len(self.x)
        else:
            self.v_max = V_P * min(self.v_limit, p.omega_n * dist)
            scale = 2.0 * (self.v_max / dist) ** 2
            self.a_max = [c * scale for c in d]

        for i, ax in enumerate(self.axes):
            err = d[i]
            self._update_axis_phase(ax, err, x_t[i], omg2, self.a_max[i])
            if ax.phase is Phase.CONVERGENCE and ax.x_t0 != 0.0:
                rel = ax.target_at_switch - self.x[i]
                slope = 2.0 * ax.a_peak / abs(ax.x_t0)
                cmd = slope * (rel - 0.5 * ax.x_t0)
            else:
                raw = omg2 * abs(err)
                lim = abs(self.a_max[i])
                cmd = math.copysign(min(raw, lim), err) if err != 0.0 else 0.0
            self.acc_cmd[i] = cmd
            acc = cmd - mu * self.v[i]
            v = self.v[i] + acc * dt
            vlim = self.v_limit
            if v > vlim:
                v = vlim
            elif v < -vlim:
                v = -vlim
            self.v[i] = v
            self.x[i] += v * dt

    @staticmethod
    def _update_axis_phase(ax: _Axis, e_new: float, target: float,
                           omg2: float, a_max_i: float) -> None:
        # The latched peak belongs to the immediately preceding divergence
        # phase, so the running max restarts whenever a new one begins
        # (unlike the force controller, whose latch spans the whole cycle).
        prev = ax.prev_err
        if e_new * prev < 0.0 or (e_new == 0.0 and prev != 0.0):
            ax.phase = Phase.DIVERGENCE
            ax.running_max = abs(e_new)
            ax.x_t0 = 0.0
        else:
            delta = abs(e_new) - abs(prev)
            if delta < -PHASE_EPS:
                if ax.phase is Phase.DIVERGENCE:
                    ax.x_t0 = math.copysign(ax.running_max, e_new)
                    ax.a_peak = min(omg2 * ax.running_max, abs(a_max_i))
                    ax.target_at_switch = target
                ax.phase = Phase.CONVERGENCE
            elif delta > PHASE_EPS:
                if ax.phase is Phase.CONVERGENCE:
                    ax.running_max = abs(e_new)
                ax.phase = Phase.DIVERGENCE
            if ax.phase is Phase.DIVERGENCE and abs(e_new) > ax.running_max:
                ax.running_max = abs(e_new)
        ax.prev_err = e_new
