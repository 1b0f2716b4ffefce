"""Master- and replica-side control laws.

The master is a kinematic input device: its displacement x_M from the local
origin becomes the teleoperation setpoint contribution (directly in offset
mode, integrated as a velocity command in velocity mode), while the haptic
force rendered back to the operator combines a re-centering impedance spring
with the replica's measured interaction force scaled by the online gain K_H.

The replica tracks the composed setpoint x_d = x'_d + x''_d with a per-axis
impedance spring mapped through the Jacobian transpose on top of
Coriolis/centrifugal and gravity compensation:

    tau = C(q, q_dot) + G(q) + J(q)^T * FIC(x_d - x_R)

The transpose mapping needs no matrix inversion, so singular configurations
require no special casing and each task axis force stays below its
saturation limit by construction.
"""

from __future__ import annotations

from .fic import FicParams, FicState, fic_force, update_phase
from .plant import dynamics_terms, forward_kinematics, jacobian

# Velocity-mode integration gain [1/s]: converts the master displacement
# into a setpoint rate so the update stays dimensionally consistent.
VELOCITY_GAIN = 1.0

OFFSET = "offset"
VELOCITY = "velocity"


class AxisFic:
    """One impedance spring per task axis sharing a single parameter set."""

    def __init__(self, params: FicParams, n_axes: int = 3):
        self.params = params
        self.states = [FicState() for _ in range(n_axes)]

    def force(self, err) -> tuple:
        """Update each axis phase with this tick's error and return forces."""
        out = []
        for s, e in zip(self.states, err):
            update_phase(s, e)
            out.append(fic_force(self.params, s, e))
        return tuple(out)

    def phases(self) -> tuple:
        return tuple(s.phase for s in self.states)


def haptic_gain(raw: float) -> float:
    """Clamp the grasp-input analogue to the valid gain range [0, 1]."""
    if raw < 0.0:
        return 0.0
    if raw > 1.0:
        return 1.0
    return raw


def compose_setpoint(x_prime_d, x_dprime_d) -> tuple:
    """Superimpose the teleoperation and autonomous setpoint contributions."""
    return tuple(a + b for a, b in zip(x_prime_d, x_dprime_d))


def master_force(x_m, f_r, k_h: float, fic: AxisFic) -> tuple:
    """Haptic force rendered on the master device [N].

    The impedance term pulls the master handle back toward its local origin,
    rendering the replica workspace boundary; the measured replica force is
    fed back scaled by the online haptic gain.
    """
    spring = fic.force(tuple(-c for c in x_m))
    return tuple(s + k_h * f for s, f in zip(spring, f_r))


def teleop_setpoint(mode: str, x_m, prev, dt: float, origin=(0.0, 0.0, 0.0)) -> tuple:
    """One update of the teleoperation setpoint contribution x'_d."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if mode == OFFSET:
        return tuple(o + c for o, c in zip(origin, x_m))
    if mode == VELOCITY:
        return tuple(p + VELOCITY_GAIN * c * dt for p, c in zip(prev, x_m))
    raise ValueError(f"unknown teleoperation mode: {mode!r}")


class SetpointTracker:
    """Holds x'_d across mode switches so the replica never sees a jump.

    Switching to velocity mode keeps the current x'_d as the integration
    origin; switching back to offset mode rebases the master origin so the
    same master pose maps onto the setpoint reached so far. On either
    switch tick x'_d is left untouched.
    """

    def __init__(self):
        self.mode = OFFSET
        self.origin = (0.0, 0.0, 0.0)
        self.x_prime_d = (0.0, 0.0, 0.0)

    def update(self, mode: str, x_m, dt: float) -> tuple:
        if mode not in (OFFSET, VELOCITY):
            raise ValueError(f"unknown teleoperation mode: {mode!r}")
        if mode != self.mode:
            if mode == OFFSET:
                self.origin = tuple(p - c for p, c in zip(self.x_prime_d, x_m))
            self.mode = mode
            return self.x_prime_d
        self.x_prime_d = teleop_setpoint(mode, x_m, self.x_prime_d, dt, self.origin)
        return self.x_prime_d


def replica_torque(model, q, q_dot, x_d, fic: AxisFic):
    """Joint torque command; also returns the task force and measured pose.

    tau = C + G + J^T f with f the per-axis impedance force on x_d - x_R.
    """
    x_r = forward_kinematics(model, q)
    err = tuple(d - r for d, r in zip(x_d, x_r))
    f_task = fic.force(err)
    (_, c_vec, g_vec) = dynamics_terms(model, q, q_dot)
    j = jacobian(model, q)
    n = model.dof
    tau = tuple(
        c_vec[k] + g_vec[k] + sum(j[i][k] * f_task[i] for i in range(3))
        for k in range(n)
    )
    return tau, f_task, x_r, err
