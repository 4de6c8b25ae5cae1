"""CSV and JSON emission of trajectories, diagnostics and run summaries.

Floats are written with 17 significant digits so that reading a file back
gives the exact same doubles.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .diagnostics import DiagnosticsSeries
from .dynamics import Trajectory, ViolationReport

TRAJECTORY_COLUMNS = ("t", "agent_id", "pos_x", "pos_y", "vel_x", "vel_y", "acc_x", "acc_y")
DIAGNOSTICS_COLUMNS = DiagnosticsSeries.COLUMNS


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_COLUMNS)
        for n, t in enumerate(trajectory.times):
            ts = fmt(t)
            for i in range(trajectory.positions.shape[1]):
                x, y = trajectory.positions[n, i]
                vx, vy = trajectory.velocities[n, i]
                ax, ay = trajectory.accelerations[n, i]
                writer.writerow((ts, i, fmt(x), fmt(y), fmt(vx), fmt(vy), fmt(ax), fmt(ay)))


def read_trajectory_csv(path: str | Path):
    """Return ``(times, positions, velocities, accelerations)`` arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != TRAJECTORY_COLUMNS:
            raise ValueError(f"unexpected trajectory header {header}")
        rows = [(float(r[0]), int(r[1]), *map(float, r[2:])) for r in reader]
    k = max(r[1] for r in rows) + 1
    table = np.array([r[2:] for r in rows]).reshape(-1, k, 6)
    times = np.array([r[0] for r in rows[::k]])
    return times, table[..., 0:2], table[..., 2:4], table[..., 4:6]


def write_diagnostics_csv(diagnostics: DiagnosticsSeries, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DIAGNOSTICS_COLUMNS)
        for row in diagnostics.as_table():
            writer.writerow([fmt(v) for v in row])


def read_diagnostics_csv(path: str | Path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader)) != DIAGNOSTICS_COLUMNS:
            raise ValueError("unexpected diagnostics header")
        return np.array([[float(v) for v in row] for row in reader])


def write_avg_distance_csv(trajectories: dict[str, Trajectory], d0: float, d1: float,
                           path: str | Path) -> None:
    """Average inter-agent distance of several runs side by side, with the bound lines.

    Runs that halted early leave their remaining cells empty.
    """
    names = list(trajectories)
    longest = max(trajectories.values(), key=len)
    lower, upper = fmt(math.sqrt(d0)), fmt(math.sqrt(d1))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", *names, "sqrt_d0", "sqrt_d1"])
        for n, t in enumerate(longest.times):
            cells = [fmt(tr.diagnostics.avg_distance[n]) if n < len(tr) else ""
                     for tr in trajectories.values()]
            writer.writerow([fmt(t), *cells, lower, upper])


@dataclass(frozen=True)
class RunSummary:
    law: str
    completed: bool
    violation: ViolationReport | None
    convergence_time: float | None
    final_time: float
    final_avg_distance: float
    min_avg_distance: float
    max_avg_distance: float
    min_sq_dist: float
    max_sq_dist: float

    @classmethod
    def from_trajectory(cls, trajectory: Trajectory, threshold: float = 1e-3) -> RunSummary:
        diag = trajectory.diagnostics
        below = np.flatnonzero(diag.dispersion < threshold)
        return cls(
            law=trajectory.spec.law.value,
            completed=trajectory.completed,
            violation=trajectory.violation,
            convergence_time=float(diag.time[below[0]]) if len(below) else None,
            final_time=float(trajectory.times[-1]),
            final_avg_distance=float(diag.avg_distance[-1]),
            min_avg_distance=float(diag.avg_distance.min()),
            max_avg_distance=float(diag.avg_distance.max()),
            min_sq_dist=float(diag.min_sq_dist.min()),
            max_sq_dist=float(diag.max_sq_dist.max()),
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.violation is not None:
            out["violation"]["pair"] = list(self.violation.pair) if self.violation.pair else None
        return out


def write_json(data, path: str | Path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
