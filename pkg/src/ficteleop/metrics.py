"""Run metrics computed from a log table.

All quantities are derived purely from logged columns, so metrics recomputed
from an exported file match the in-run values exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .logio import RunLog


@dataclass
class Metrics:
    max_err: tuple          # per-axis max |tracking error| [m]
    free_fraction: float    # free-motion ticks with ||err|| <= x_b
    max_task_force: float   # max per-axis |controller force| [N]
    max_external_force: float  # max ||contact + bond force|| [N]
    net_energy: float       # controller work output along the error path [J]
    bond_break_time: float | None

    def to_dict(self) -> dict:
        return {
            "max_err": list(self.max_err),
            "free_fraction": self.free_fraction,
            "max_task_force": self.max_task_force,
            "max_external_force": self.max_external_force,
            "net_energy": self.net_energy,
            "bond_break_time": self.bond_break_time,
        }


def compute_metrics(log: RunLog, x_b: float | None = None) -> Metrics:
    """Summarize a run; x_b defaults to the replica band stored in the log."""
    if log.data.shape[0] == 0:
        raise ValueError("cannot compute metrics of an empty log")
    if x_b is None:
        x_b = float(log.meta["x_b"])

    err = log.data[:, 13:16]
    fcmd = log.data[:, 16:19]
    fext = log.data[:, 19:22]
    bond = log.data[:, 22]
    t = log.data[:, 0]

    max_err = tuple(float(v) for v in np.max(np.abs(err), axis=0))
    err_norm = np.linalg.norm(err, axis=1)
    fext_norm = np.linalg.norm(fext, axis=1)

    free = fext_norm == 0.0
    n_free = int(np.count_nonzero(free))
    free_fraction = (
        float(np.count_nonzero(err_norm[free] <= x_b) / n_free) if n_free else 1.0
    )

    max_task_force = float(np.max(np.abs(fcmd)))
    max_external_force = float(np.max(fext_norm))

    # Work output accumulated against the error coordinate: trapezoid of
    # -f d(err) per axis. Setpoint motion counts as external energy input.
    d_err = np.diff(err, axis=0)
    f_mid = 0.5 * (fcmd[1:] + fcmd[:-1])
    net_energy = float(-np.sum(f_mid * d_err))

    breaks = np.nonzero((bond[:-1] == 1.0) & (bond[1:] == 0.0))[0]
    bond_break_time = float(t[breaks[0] + 1]) if breaks.size else None

    return Metrics(
        max_err=max_err,
        free_fraction=free_fraction,
        max_task_force=max_task_force,
        max_external_force=max_external_force,
        net_energy=net_energy,
        bond_break_time=bond_break_time,
    )


def contact_intervals(log: RunLog, merge_gap: float = 0.0) -> list[tuple[float, float]]:
    """Maximal [start, end] time spans with non-zero external force."""
    fext_norm = np.linalg.norm(log.data[:, 19:22], axis=1)
    t = log.data[:, 0]
    active = fext_norm > 0.0
    spans: list[tuple[float, float]] = []
    start = None
    for k in range(len(t)):
        if active[k] and start is None:
            start = t[k]
        elif not active[k] and start is not None:
            spans.append((float(start), float(t[k - 1])))
            start = None
    if start is not None:
        spans.append((float(start), float(t[-1])))
    if merge_gap > 0.0 and spans:
        merged = [spans[0]]
        for s, e in spans[1:]:
            if s - merged[-1][1] <= merge_gap:
                merged[-1] = (merged[-1][0], e)
            else:
                merged.append((s, e))
        spans = merged
    return spans


def free_motion_fraction_within(log: RunLog, x_b: float) -> float:
    m = compute_metrics(log, x_b=x_b)
    return m.free_fraction


def max_error_norm(log: RunLog) -> float:
    return float(np.max(np.linalg.norm(log.data[:, 13:16], axis=1)))


def all_finite(log: RunLog) -> bool:
    return bool(np.isfinite(log.data).all()) and not math.isnan(float(log.data[-1, 0]))
