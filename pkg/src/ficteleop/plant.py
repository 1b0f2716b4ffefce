"""Simulated plants: Cartesian point mass and planar two-link arm.

Both plants expose the same contract: generalized coordinates q, forward
kinematics into a 3-D task space (the arm moves in the x-y plane, z = 0),
an analytic Jacobian, and the standard manipulator terms M, C, G. The
environment adds one-sided penalty contacts (spring-damper on penetration
depth, no tangential friction) and a breakable "velcro" spring bond.

Two-link conventions: joint angles measured from the +x axis, gravity acts
along -y, links are uniform rods (I = m*l^2/12 about the COM).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class PlantDiverged(RuntimeError):
    """Raised when the integrator produces a non-finite state."""


@dataclass(frozen=True)
class PointMass:
    mass: float = 1.0
    damping: float = 0.0  # viscous drag [N*s/m]; stands in for hardware friction

    def __post_init__(self) -> None:
        if not (self.mass > 0):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.damping < 0:
            raise ValueError(f"damping must be non-negative, got {self.damping}")

    @property
    def dof(self) -> int:
        return 3


@dataclass(frozen=True)
class TwoLink:
    """Planar 2R arm; sized so interaction forces land in the tens of newtons."""

    m1: float = 2.0
    m2: float = 2.0
    l1: float = 0.4
    l2: float = 0.4
    lc1: float = 0.2
    lc2: float = 0.2
    i1: float = 2.0 * 0.4 * 0.4 / 12.0
    i2: float = 2.0 * 0.4 * 0.4 / 12.0
    gravity: float = 9.81
    joint_damping: float = 0.0  # viscous joint drag [N*m*s]

    def __post_init__(self) -> None:
        for name in ("m1", "m2", "l1", "l2", "lc1", "lc2", "i1", "i2"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive")
        if self.joint_damping < 0:
            raise ValueError("joint_damping must be non-negative")

    @property
    def dof(self) -> int:
        return 2


@dataclass
class BondState:
    attached: bool = False
    anchor: tuple[float, float, float] = (0.0, 0.0, 0.0)
    k_v: float = 5000.0    # bond stiffness [N/m]
    f_break: float = 15.0  # rupture threshold [N]


@dataclass
class Obstacle:
    """Axis-aligned box (default) or half-plane penalty contact."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    half_extents: tuple[float, float, float] = (0.01, 0.01, 0.01)
    normal: tuple[float, float, float] | None = None  # half-plane if set
    k_c: float = 5000.0  # contact stiffness [N/m]
    d_c: float = 50.0    # contact damping [N*s/m]

    def __post_init__(self) -> None:
        if not (self.k_c > 0):
            raise ValueError("k_c must be positive")
        if self.d_c < 0:
            raise ValueError("d_c must be non-negative")
        if self.normal is not None:
            n = math.sqrt(sum(c * c for c in self.normal))
            if n == 0:
                raise ValueError("half-plane normal must be non-zero")
            self.normal = tuple(c / n for c in self.normal)


@dataclass
class PlantState:
    q: list[float]
    q_dot: list[float]
    t: float = 0.0
    bond: BondState = field(default_factory=BondState)


def forward_kinematics(model, q):
    """End-effector task-space position [m]."""
    if isinstance(model, PointMass):
        return (q[0], q[1], q[2])
    c1 = math.cos(q[0])
    s1 = math.sin(q[0])
    c12 = math.cos(q[0] + q[1])
    s12 = math.sin(q[0] + q[1])
    return (model.l1 * c1 + model.l2 * c12, model.l1 * s1 + model.l2 * s12, 0.0)


def jacobian(model, q):
    """Task-space Jacobian rows (3 x dof), analytic."""
    if isinstance(model, PointMass):
        return ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))
    s1 = math.sin(q[0])
    c1 = math.cos(q[0])
    s12 = math.sin(q[0] + q[1])
    c12 = math.cos(q[0] + q[1])
    l1, l2 = model.l1, model.l2
    return (
        (-l1 * s1 - l2 * s12, -l2 * s12),
        (l1 * c1 + l2 * c12, l2 * c12),
        (0.0, 0.0),
    )


def ee_velocity(model, q, q_dot):
    """Task-space end-effector velocity J(q)*q_dot [m/s]."""
    if isinstance(model, PointMass):
        return (q_dot[0], q_dot[1], q_dot[2])
    j = jacobian(model, q)
    return (
        j[0][0] * q_dot[0] + j[0][1] * q_dot[1],
        j[1][0] * q_dot[0] + j[1][1] * q_dot[1],
        0.0,
    )


def dynamics_terms(model, q, q_dot):
    """Mass matrix, Coriolis/centrifugal vector and gravity vector.

    Point mass: M = m*I, C = G = 0 (no gravity, so pure-controller tests
    stay free of static offsets). Two-link: standard closed forms.
    """
    if isinstance(model, PointMass):
        m = model.mass
        return (
            ((m, 0.0, 0.0), (0.0, m, 0.0), (0.0, 0.0, m)),
            (0.0, 0.0, 0.0),
            (0.0, 0.0, 0.0),
        )
    m1, m2 = model.m1, model.m2
    l1 = model.l1
    lc1, lc2 = model.lc1, model.lc2
    c2 = math.cos(q[1])
    s2 = math.sin(q[1])
    m11 = m1 * lc1 * lc1 + model.i1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * c2) + model.i2
    m12 = m2 * (lc2 * lc2 + l1 * lc2 * c2) + model.i2
    m22 = m2 * lc2 * lc2 + model.i2
    h = m2 * l1 * lc2 * s2
    c_vec = (-h * (2 * q_dot[0] * q_dot[1] + q_dot[1] * q_dot[1]), h * q_dot[0] * q_dot[0])
    g = model.gravity
    c1 = math.cos(q[0])
    c12 = math.cos(q[0] + q[1])
    g2 = m2 * lc2 * g * c12
    g1 = (m1 * lc1 + m2 * l1) * g * c1 + g2
    return (((m11, m12), (m12, m22)), c_vec, (g1, g2))


def contact_forces(x, x_dot, obstacles):
    """Total penalty contact force at the end effector [N].

    Per obstacle: penetration depth d along the outward normal gives
    f = max(0, k_c*d - d_c*v_n) directed outward, where v_n is the normal
    velocity (positive when separating). One-sided: never pulls.
    """
    fx = fy = fz = 0.0
    for ob in obstacles:
        if ob.normal is not None:
            nx, ny, nz = ob.normal
            gap = (x[0] - ob.center[0]) * nx + (x[1] - ob.center[1]) * ny + (x[2] - ob.center[2]) * nz
            if gap >= 0.0:
                continue
            depth = -gap
        else:
            dx = x[0] - ob.center[0]
            dy = x[1] - ob.center[1]
            dz = x[2] - ob.center[2]
            hx, hy, hz = ob.half_extents
            px = hx - abs(dx)
            py = hy - abs(dy)
            pz = hz - abs(dz)
            if px <= 0.0 or py <= 0.0 or pz <= 0.0:
                continue
            # push out through the nearest face
            if px <= py and px <= pz:
                depth = px
                nx, ny, nz = (1.0 if dx >= 0 else -1.0), 0.0, 0.0
            elif py <= pz:
                depth = py
                nx, ny, nz = 0.0, (1.0 if dy >= 0 else -1.0), 0.0
            else:
                depth = pz
                nx, ny, nz = 0.0, 0.0, (1.0 if dz >= 0 else -1.0)
        v_n = x_dot[0] * nx + x_dot[1] * ny + x_dot[2] * nz
        f = ob.k_c * depth - ob.d_c * v_n
        if f <= 0.0:
            continue
        fx += f * nx
        fy += f * ny
        fz += f * nz
    return (fx, fy, fz)


def bond_force(x, bond: BondState):
    """Spring force of the velcro bond [N]; breaks above f_break.

    The rupture-tick force is still reported (the bond carries load while it
    tears); afterwards the bond stays detached until explicitly re-armed.
    Mutates bond and returns the force.
    """
    if not bond.attached:
        return (0.0, 0.0, 0.0)
    fx = bond.k_v * (bond.anchor[0] - x[0])
    fy = bond.k_v * (bond.anchor[1] - x[1])
    fz = bond.k_v * (bond.anchor[2] - x[2])
    if math.sqrt(fx * fx + fy * fy + fz * fz) > bond.f_break:
        bond.attached = False
    return (fx, fy, fz)


def step_dynamics(model, state: PlantState, tau, f_ext_task, dt: float) -> None:
    """Semi-implicit Euler step: q_ddot = M^-1 (tau + J^T f_ext - C - G)."""
    if not (0.0 < dt <= 0.01):
        raise ValueError(f"dt must lie in (0, 0.01], got {dt}")
    q = state.q
    qd = state.q_dot
    if isinstance(model, PointMass):
        inv_m = 1.0 / model.mass
        b = model.damping
        for i in range(3):
            qdd = (tau[i] + f_ext_task[i] - b * qd[i]) * inv_m
            qd[i] += qdd * dt
            q[i] += qd[i] * dt
    else:
        (m_mat, c_vec, g_vec) = dynamics_terms(model, q, qd)
        j = jacobian(model, q)
        b = model.joint_damping
        rhs1 = (tau[0] + j[0][0] * f_ext_task[0] + j[1][0] * f_ext_task[1]
                - c_vec[0] - g_vec[0] - b * qd[0])
        rhs2 = (tau[1] + j[0][1] * f_ext_task[0] + j[1][1] * f_ext_task[1]
                - c_vec[1] - g_vec[1] - b * qd[1])
        det = m_mat[0][0] * m_mat[1][1] - m_mat[0][1] * m_mat[1][0]
        qdd1 = (m_mat[1][1] * rhs1 - m_mat[0][1] * rhs2) / det
        qdd2 = (m_mat[0][0] * rhs2 - m_mat[1][0] * rhs1) / det
        qd[0] += qdd1 * dt
        qd[1] += qdd2 * dt
        q[0] += qd[0] * dt
        q[1] += qd[1] * dt
    state.t += dt
    for v in q:
        if not math.isfinite(v):
            raise PlantDiverged(
                f"non-finite plant state at t={state.t:.6f}s: q={q}, q_dot={qd}"
            )


def kinetic_energy(model, q, q_dot) -> float:
    (m_mat, _, _) = dynamics_terms(model, q, q_dot)
    n = model.dof
    return 0.5 * sum(
        q_dot[i] * m_mat[i][j] * q_dot[j] for i in range(n) for j in range(n)
    )
