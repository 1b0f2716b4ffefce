"""Wire protocol for live and replay sessions.

Messages are newline-delimited JSON objects carried over a bidirectional
socket (one JSON line per WebSocket text frame). Unknown fields are
ignored; unknown message types are rejected with an error frame.
"""

from __future__ import annotations

import json

from .controllers import OFFSET, VELOCITY


class ProtocolError(ValueError):
    pass


def encode(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def state_frame(t, x_r, x_d, f_r, f_master, bond, delay) -> str:
    return encode({
        "type": "state_frame",
        "t": t,
        "x_r": list(x_r),
        "x_d": list(x_d),
        "f_r": list(f_r),
        "f_master": list(f_master),
        "bond": bool(bond),
        "delay": delay,
    })


def event(kind: str, t: float) -> str:
    return encode({"type": "event", "kind": kind, "t": t})


def error(message: str) -> str:
    return encode({"type": "error", "message": message})


def parse_line(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "type" not in obj:
        raise ProtocolError("message must be an object with a 'type' field")
    return obj


def parse_operator_input(obj: dict, x_m_limit: float):
    """Extract and clamp an operator_input message.

    x_m is clamped per axis to the master workspace box and k_h to [0, 1];
    a misbehaving client cannot push the simulation outside its contract.
    """
    if obj.get("type") != "operator_input":
        raise ProtocolError(f"expected operator_input, got {obj.get('type')!r}")
    try:
        raw = obj["x_m"]
        x_m = tuple(
            min(max(float(raw[i]), -x_m_limit), x_m_limit) for i in range(3)
        )
        k_h = min(max(float(obj["k_h"]), 0.0), 1.0)
        mode = obj["mode"]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed operator_input: {exc}") from exc
    if mode not in (OFFSET, VELOCITY):
        raise ProtocolError(f"unknown mode: {mode!r}")
    return x_m, k_h, mode
