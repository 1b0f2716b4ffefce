"""Run logs and their on-disk formats.

A RunLog is a dense per-tick table with a fixed, documented column order
plus a metadata header (config hash, seed, package version). Exports
round-trip exactly: floats are written with shortest-round-trip repr, so a
log read back from CSV or JSONL compares bit-identical to the in-memory one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

#: Exact column order of the per-tick table.
COLUMNS = [
    "t",
    "xd_x", "xd_y", "xd_z",
    "xpd_x", "xpd_y", "xpd_z",
    "xppd_x", "xppd_y", "xppd_z",
    "xr_x", "xr_y", "xr_z",
    "err_x", "err_y", "err_z",
    "fcmd_x", "fcmd_y", "fcmd_z",
    "fext_x", "fext_y", "fext_z",
    "bond_attached",
    "phase_x", "phase_y", "phase_z",
    "ch_m2r_inflight", "ch_r2m_inflight",
]

#: Columns carrying small integers (flags, phase codes, queue depths).
INT_COLUMNS = {"bond_attached", "phase_x", "phase_y", "phase_z",
               "ch_m2r_inflight", "ch_r2m_inflight"}

_INT_IDX = [COLUMNS.index(c) for c in sorted(INT_COLUMNS, key=COLUMNS.index)]


@dataclass
class RunLog:
    meta: dict
    data: np.ndarray  # shape (n_ticks, len(COLUMNS))

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.shape[1] != len(COLUMNS):
            raise ValueError(f"log table must have {len(COLUMNS)} columns")

    def column(self, name: str) -> np.ndarray:
        return self.data[:, COLUMNS.index(name)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RunLog)
            and self.meta == other.meta
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )


def _format_value(col_idx: int, v: float) -> str:
    if col_idx in _INT_IDX:
        return str(int(v))
    return repr(float(v))


def export_log(log: RunLog, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        export_csv(log, path)
    elif fmt == "jsonl":
        export_jsonl(log, path)
    else:
        raise ValueError(f"unknown log format: {fmt!r} (expected 'csv' or 'jsonl')")


def read_log(path) -> RunLog:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith("#"):
        return read_csv(path)
    return read_jsonl(path)


def export_csv(log: RunLog, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# meta " + json.dumps(log.meta, sort_keys=True) + "\n")
            fh.write(",".join(COLUMNS) + "\n")
            for row in log.data:
                fh.write(",".join(_format_value(i, v) for i, v in enumerate(row)) + "\n")
    except OSError as exc:
        raise OSError(f"failed to write log to {path}: {exc}") from exc


def read_csv(path) -> RunLog:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"failed to read log from {path}: {exc}") from exc
    if not lines or not lines[0].startswith("# meta "):
        raise ValueError(f"{path}: missing metadata header line")
    meta = json.loads(lines[0][len("# meta "):])
    if lines[1].split(",") != COLUMNS:
        raise ValueError(f"{path}: column header does not match documented order")
    rows = [[float(c) for c in line.split(",")] for line in lines[2:] if line]
    return RunLog(meta=meta, data=np.array(rows, dtype=float).reshape(len(rows), len(COLUMNS)))


def export_jsonl(log: RunLog, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps({"type": "meta", **log.meta}, sort_keys=True) + "\n")
            for row in log.data:
                obj = "{" + ", ".join(
                    f'"{c}": {_format_value(i, v)}'
                    for i, (c, v) in enumerate(zip(COLUMNS, row))
                ) + "}"
                fh.write(obj + "\n")
    except OSError as exc:
        raise OSError(f"failed to write log to {path}: {exc}") from exc


def read_jsonl(path) -> RunLog:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"failed to read log from {path}: {exc}") from exc
    if not lines:
        raise ValueError(f"{path}: empty log file")
    meta = json.loads(lines[0])
    if meta.pop("type", None) != "meta":
        raise ValueError(f"{path}: first line must be the meta object")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        obj = json.loads(line)
        rows.append([float(obj[c]) for c in COLUMNS])
    return RunLog(meta=meta, data=np.array(rows, dtype=float).reshape(len(rows), len(COLUMNS)))
