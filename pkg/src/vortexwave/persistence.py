"""Branch tables, solution snapshots, and run summaries on disk.

All files are deterministic for a fixed configuration and build: floats are
written with repr (shortest round-trip form), JSON keys are sorted, and no
timestamps or environment details are recorded.  The branch table is flushed
per point so an interrupted run still holds a valid prefix.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .continuation import BranchPoint
from .errors import NonFiniteEntry
from .spectral import EvenField
from .system import WaveState

SCHEMA = 1

CSV_COLUMNS = (
    "step",
    "strength",
    "speed",
    "elevation_sup",
    "elevation_sobolev",
    "elevation_center",
    "vortex_distance",
    "det_sign",
    "smallest_singular",
    "newton_iterations",
    "residual_norm",
)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


class BranchWriter:
    """Appends one CSV row per accepted branch point, flushing each."""

    def __init__(self, path: str, config_hash: str):
        self.path = path
        self._handle = open(path, "w", encoding="utf-8")
        self._handle.write(f"# schema = {SCHEMA}\n")
        self._handle.write(f"# config = {config_hash}\n")
        self._handle.write(",".join(CSV_COLUMNS) + "\n")
        self._handle.flush()
        self._step = 0

    def write(self, point: BranchPoint, elevation_sup: float):
        row = (
            self._step,
            point.strength,
            point.state.speed,
            elevation_sup,
            point.elevation_norm,
            point.elevation_center,
            point.vortex_distance,
            point.det_sign,
            point.smallest_singular,
            point.newton_iterations,
            point.residual_norm,
        )
        self._handle.write(",".join(_fmt(v) for v in row) + "\n")
        self._handle.flush()
        self._step += 1

    def close(self):
        self._handle.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def load_branch_table(path: str) -> dict[str, np.ndarray]:
    """Columns of a branch table as arrays, keyed by header name."""
    with open(path, encoding="utf-8") as handle:
        lines = [ln.rstrip("\n") for ln in handle if not ln.startswith("#")]
    names = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:] if ln]
    data = np.array(rows, dtype=float) if rows else np.zeros((0, len(names)))
    return {name: data[:, j] for j, name in enumerate(names)}


def snapshot_record(point: BranchPoint, n_modes: int, m_vertical: int,
                    half_period: float, depth: float,
                    config_hash: str) -> dict:
    return {
        "schema": SCHEMA,
        "config": config_hash,
        "grid": {
            "n_modes": n_modes,
            "m_vertical": m_vertical,
            "half_period": half_period,
            "depth": depth,
        },
        "strength": point.strength,
        "speed": point.state.speed,
        "elevation": point.state.elevation.coeffs.tolist(),
        "trace_upper": point.state.trace_upper.coeffs.tolist(),
        "trace_lower": point.state.trace_lower.coeffs.tolist(),
        "diagnostics": {
            "residual_norm": point.residual_norm,
            "newton_iterations": point.newton_iterations,
            "smallest_singular": point.smallest_singular,
            "det_sign": point.det_sign,
            "elevation_sobolev": point.elevation_norm,
            "elevation_center": point.elevation_center,
            "vortex_distance": point.vortex_distance,
        },
    }


def write_snapshot(path: str, record: dict):
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(record, handle, sort_keys=True, indent=1)
        handle.write("\n")


def load_snapshot(path: str) -> tuple[WaveState, float, dict]:
    """Snapshot back to (state, strength, full record)."""
    with open(path, encoding="utf-8") as handle:
        record = json.load(handle)
    if record.get("schema") != SCHEMA:
        raise ValueError(
            f"snapshot schema {record.get('schema')!r} is not {SCHEMA}"
        )
    state = WaveState(
        EvenField(np.array(record["elevation"])),
        EvenField(np.array(record["trace_upper"])),
        EvenField(np.array(record["trace_lower"])),
        float(record["speed"]),
    )
    for block in ("elevation", "trace_upper", "trace_lower"):
        if not np.all(np.isfinite(record[block])):
            raise NonFiniteEntry(f"snapshot block {block} is not finite")
    return state, float(record["strength"]), record


def write_summary(path: str, config_echo: dict, config_hash: str,
                  mode: str, direction: int | None, termination: str | None,
                  n_points: int, final_strength: float, exit_code: int):
    record = {
        "schema": SCHEMA,
        "config": config_echo,
        "config_hash": config_hash,
        "mode": mode,
        "direction": direction,
        "termination": termination,
        "points": n_points,
        "final_strength": final_strength,
        "exit_code": exit_code,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(record, handle, sort_keys=True, indent=1)
        handle.write("\n")


def ensure_dir(path: str):
    os.makedirs(path, exist_ok=True)
