"""Mono-dimensional fractal impedance controller (FIC).

The controller is a passive non-linear spring evaluated independently per
task-space axis. While the tracking error grows (divergence phase) the
force follows a stiffness profile that is linear near the origin and
saturates smoothly via a tanh branch. When the error starts shrinking
(convergence phase) the controller latches the peak error and redistributes
the stored energy along a linear force profile that crosses zero at half the
peak, so the system arrives at the target with the stored energy spent.

Force profile (per axis, error e = x_d - x):

    |e| <= xi*x_b :  K0*e
    else          :  sign(e) * [ dF/2 * (tanh((|e|-x_b)/S + pi) + 1) + F0 ]

with F0 = xi*K0*x_b, dF = F_max - F0 and S = (1-xi)*x_b/(2*pi). The argument
equals -pi at the branch switch, so the profile is continuous there up to a
tanh(-pi) residue, and approaches F_max asymptotically without reaching it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from scipy.integrate import quad

# Magnitude changes below this deadband neither trigger a phase switch nor a
# cycle reset; keeps sensor-scale noise from chattering the phase machine.
PHASE_EPS = 1e-6


class Phase(Enum):
    DIVERGENCE = 0
    CONVERGENCE = 1


@dataclass(frozen=True)
class FicParams:
    """Spring profile constants for one axis.

    k0:    constant stiffness [N/m]
    x_b:   tracking error where force saturation occurs [m]
    f_max: force saturation [N]
    xi:    fraction of x_b where the saturation branch takes over, in (0, 1)
    """

    k0: float
    x_b: float
    f_max: float
    xi: float

    def __post_init__(self) -> None:
        if not (self.k0 > 0 and math.isfinite(self.k0)):
            raise ValueError(f"k0 must be positive, got {self.k0}")
        if not (self.x_b > 0 and math.isfinite(self.x_b)):
            raise ValueError(f"x_b must be positive, got {self.x_b}")
        if not (0.0 < self.xi < 1.0):
            raise ValueError(f"xi must lie in (0, 1), got {self.xi}")
        if not (self.f_max > self.xi * self.k0 * self.x_b):
            raise ValueError(
                f"f_max={self.f_max} must exceed the linear-branch force "
                f"xi*k0*x_b={self.xi * self.k0 * self.x_b}"
            )

    @property
    def f0(self) -> float:
        """Force at the onset of saturation [N]."""
        return self.xi * self.k0 * self.x_b

    @property
    def df(self) -> float:
        """Remaining force headroom above f0 [N]."""
        return self.f_max - self.f0

    @property
    def s(self) -> float:
        """Saturation speed length scale [m]."""
        return (1.0 - self.xi) * self.x_b / (2.0 * math.pi)


#: Replica-side defaults: K0 and x_b sized for ~5 cm acceptable tracking error.
REPLICA_DEFAULTS = FicParams(k0=200.0, x_b=0.05, f_max=20.0, xi=0.9)

#: Master-side defaults, sized to a desktop haptic device's force range.
MASTER_DEFAULTS = FicParams(k0=100.0, x_b=0.05, f_max=5.0, xi=0.9)


@dataclass
class FicState:
    """Per-axis phase memory.

    x_max is the signed peak error latched at the last divergence-to-
    convergence switch; 0.0 means no latch is active in the current cycle.
    running_max tracks the largest error magnitude seen since the last cycle
    reset (sign change of the error), so a re-latch inside the same cycle can
    only keep or widen the convergence spring.
    """

    phase: Phase = Phase.DIVERGENCE
    x_max: float = 0.0
    prev_err: float = 0.0
    running_max: float = 0.0
    initialized: bool = field(default=False, repr=False)


def force_profile(p: FicParams, e: float) -> float:
    """Non-linear spring force [N] for error e [m]; odd in e, |f| < f_max."""
    mag = abs(e)
    if mag <= p.xi * p.x_b:
        return p.k0 * e
    arg = (mag - p.x_b) / p.s + math.pi
    f = 0.5 * p.df * (math.tanh(arg) + 1.0) + p.f0
    # tanh saturates to 1.0 exactly in float64 for large errors; nudge below
    # f_max so the strict saturation bound holds for every input.
    if f >= p.f_max:
        f = math.nextafter(p.f_max, 0.0)
    return math.copysign(f, e)


def update_phase(s: FicState, e_new: float) -> FicState:
    """Advance the divergence/convergence machine with this tick's error.

    Convergence triggers when the error magnitude decreases (beyond the
    deadband); the signed peak is latched at that switch. A sign change of
    the error ends the cycle: phase returns to divergence, the latch clears
    and running_max restarts from the new error. Mutates and returns s.
    """
    if not math.isfinite(e_new):
        raise ValueError(f"error must be finite, got {e_new}")

    if not s.initialized:
        s.initialized = True
        s.phase = Phase.DIVERGENCE
        s.prev_err = e_new
        s.running_max = abs(e_new)
        s.x_max = 0.0
        return s

    prev = s.prev_err
    if e_new * prev < 0.0 or (e_new == 0.0 and prev != 0.0):
        # Crossed (or landed exactly on) the target: fresh divergence cycle,
        # stored energy discarded. Landing on zero must clear the latch too,
        # or a stale convergence line could re-arm on the far side.
        s.phase = Phase.DIVERGENCE
        s.running_max = abs(e_new)
        s.x_max = 0.0
    else:
        s.running_max = max(s.running_max, abs(e_new))
        delta = abs(e_new) - abs(prev)
        if delta < -PHASE_EPS:
            if s.phase is Phase.DIVERGENCE:
                s.x_max = math.copysign(s.running_max, e_new)
            s.phase = Phase.CONVERGENCE
        elif delta > PHASE_EPS:
            s.phase = Phase.DIVERGENCE
        # within the deadband: hold the current phase
    s.prev_err = e_new
    return s


def _convergence_line(p: FicParams, x_max: float, e: float) -> float:
    f_peak = force_profile(p, x_max)
    return (2.0 * f_peak / x_max) * (e - 0.5 * x_max)


def fic_force(p: FicParams, s: FicState, e: float) -> float:
    """Attractor force [N]; call update_phase with e first.

    Divergence at the error frontier follows the spring profile; convergence
    follows the latched linear redistribution law. While a latch is active,
    errors inside the latched peak stay on the same line even if the phase
    flag reads divergence again — the line is a conservative spring, so
    re-diverging along it cannot pump energy into the plant.
    """
    if s.x_max == 0.0:
        return force_profile(p, e)
    if abs(e) >= abs(s.x_max):
        return force_profile(p, e)
    return _convergence_line(p, s.x_max, e)


def stored_energy(p: FicParams, e: float) -> float:
    """Energy [J] stored by the spring profile from 0 to |e|.

    Analytic in the linear region, numeric quadrature beyond; used as the
    independent oracle for passivity checks.
    """
    mag = abs(e)
    lin = min(mag, p.xi * p.x_b)
    energy = 0.5 * p.k0 * lin * lin
    if mag > p.xi * p.x_b:
        tail, _ = quad(lambda s_: force_profile(p, s_), p.xi * p.x_b, mag)
        energy += tail
    return energy
