"""Simulated one-way communication link with delay, jitter, drops and cuts.

The channel is a passive, fully deterministic data structure: envelopes are
stamped with a delivery time at send(), poll() releases everything due by
the current time. A scripted disconnection makes send() discard silently
(the cut happens at the sender, so messages already in flight still arrive),
which is exactly the failure mode the robustness scenarios exercise.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class LinkConfig:
    delay: float = 0.0       # one-way latency [s]
    jitter: float = 0.0      # max additional uniform latency [s]
    drop_prob: float = 0.0
    seed: int = 0
    ordered: bool = True     # latest-wins delivery for setpoint streams

    def __post_init__(self) -> None:
        if self.delay < 0 or not math.isfinite(self.delay):
            raise ValueError(f"delay must be >= 0, got {self.delay}")
        if self.jitter < 0 or not math.isfinite(self.jitter):
            raise ValueError(f"jitter must be >= 0, got {self.jitter}")
        if not (0.0 <= self.drop_prob <= 1.0):
            raise ValueError(f"drop_prob must lie in [0, 1], got {self.drop_prob}")


@dataclass
class Envelope:
    payload: Any
    t_send: float
    t_deliver: float
    seq: int


@dataclass
class ChannelStats:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    stale: int = 0
    dead_link: int = 0

    def in_flight(self) -> int:
        return self.sent - self.delivered - self.dropped - self.stale - self.dead_link


# poll() treats the delivery time as a closed boundary; the epsilon absorbs
# float rounding when tick grids are compared against t_send + delay.
_T_EPS = 1e-12


class DelayChannel:
    """One direction of the master<->replica link."""

    def __init__(self, config: LinkConfig):
        self.config = config
        self._rng = random.Random(config.seed)
        self._queue: list[Envelope] = []
        self._seq = 0
        self._last_delivered_seq = -1
        self._windows: list[tuple[float, float | None]] = []  # (down_from, up_at)
        self.stats = ChannelStats()

    def is_connected(self, t_now: float) -> bool:
        for down_from, up_at in self._windows:
            if t_now >= down_from and (up_at is None or t_now < up_at):
                return False
        return True

    def set_link_state(self, disconnect_at: float, reconnect_at: float | None = None) -> None:
        """Schedule a cut (and optional reconnect) on this direction."""
        if reconnect_at is not None and reconnect_at < disconnect_at:
            raise ValueError("reconnect_at must not precede disconnect_at")
        if self._windows and self._windows[-1][0] > disconnect_at:
            raise ValueError("link events must be scheduled in non-decreasing order")
        self._windows.append((disconnect_at, reconnect_at))

    def send(self, payload: Any, t_now: float) -> None:
        """Enqueue a message; silently discarded while the link is down."""
        self.stats.sent += 1
        if not self.is_connected(t_now):
            self.stats.dead_link += 1
            return
        self._seq += 1
        seq = self._seq
        if self.config.drop_prob > 0.0 and self._rng.random() < self.config.drop_prob:
            self.stats.dropped += 1
            return
        jitter = self._rng.uniform(0.0, self.config.jitter) if self.config.jitter > 0 else 0.0
        self._queue.append(
            Envelope(payload=payload, t_send=t_now,
                     t_deliver=t_now + self.config.delay + jitter, seq=seq)
        )

    def poll(self, t_now: float) -> list[Envelope]:
        """All envelopes due by t_now, in seq order; stale ones discarded."""
        due = [e for e in self._queue if e.t_deliver <= t_now + _T_EPS]
        if not due:
            return []
        self._queue = [e for e in self._queue if e.t_deliver > t_now + _T_EPS]
        due.sort(key=lambda e: e.seq)
        out: list[Envelope] = []
        for e in due:
            if self.config.ordered and e.seq <= self._last_delivered_seq:
                self.stats.stale += 1
                continue
            self._last_delivered_seq = max(self._last_delivered_seq, e.seq)
            self.stats.delivered += 1
            out.append(e)
        return out
