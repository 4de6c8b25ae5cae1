"""Graph Laplacians, velocity projection, the flock energy and run monitors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import (
    ControlParams,
    FlockState,
    _dispersion,
    alignment_weight,
    check_bounds,
    pair_indices,
    pairwise_squared_distances,
)


@dataclass(frozen=True)
class LaplacianPair:
    """Alignment Laplacian ``L_x`` and kernel-difference Laplacian ``L_f``."""

    L_x: np.ndarray
    L_f: np.ndarray


def _laplacian(first, second, weights, k) -> np.ndarray:
    adjacency = np.zeros((k, k))
    adjacency[first, second] = weights
    adjacency[second, first] = weights
    return np.diag(adjacency.sum(axis=1)) - adjacency


def build_laplacians(flock: FlockState, p: ControlParams) -> LaplacianPair:
    first, second = pair_indices(flock.k)
    s = pairwise_squared_distances(flock.positions)
    check_bounds(s, p)
    f = (s - p.d0) ** (-p.theta) - (s - p.d1) ** (-p.theta)
    return LaplacianPair(_laplacian(first, second, alignment_weight(s, p), flock.k),
                         _laplacian(first, second, f, flock.k))


def laplacian_form_inputs(flock: FlockState, p: ControlParams) -> np.ndarray:
    """Accelerations from the compact form ``-L_x v + dispersion * L_f x``."""
    lap = build_laplacians(flock, p)
    lam = _dispersion(flock.velocities)
    return -lap.L_x @ flock.velocities + lam * (lap.L_f @ flock.positions)


class ProjectedVelocity(NamedTuple):
    mean: np.ndarray
    residual: np.ndarray
    residual_norm: float


def project_velocity(flock: FlockState) -> ProjectedVelocity:
    """Split velocities into the common mean and the per-agent residual."""
    mean = flock.velocities.mean(axis=0)
    residual = flock.velocities - mean
    return ProjectedVelocity(mean, residual, float(np.linalg.norm(residual)))


def _power_antiderivative(gap, theta: int):
    # of gap**(-theta)
    if theta == 1:
        return np.log(np.abs(gap))
    return gap ** (1 - theta) / (1 - theta)


def _antiderivative(r, d: float, theta: int):
    return _power_antiderivative(r - d, theta)


def potential(sq_dists, p: ControlParams):
    """Half the summed integrals of ``f0 - f1`` from each squared distance up to ``d1 - delta``.

    Sums over the last axis, so a ``(n, P)`` array gives one value per row.
    """
    # top - d1 is exactly -delta; forming d1 - delta first would cancel badly
    upper = (_power_antiderivative(p.d1 - p.d0 - p.delta, p.theta)
             - _power_antiderivative(-p.delta, p.theta))
    s = np.asarray(sq_dists, dtype=float)
    lower = _antiderivative(s, p.d0, p.theta) - _antiderivative(s, p.d1, p.theta)
    out = 0.5 * np.sum(upper - lower, axis=-1)
    return float(out) if out.ndim == 0 else out


def energy(flock: FlockState, p: ControlParams) -> float:
    """Residual speed norm plus the pairwise barrier potential.

    Non-increasing along leaderless solutions of the proposed law. Raises
    :class:`~birdflock.core.DistanceBoundViolation` outside the bounds, where
    the potential is undefined.
    """
    s = pairwise_squared_distances(flock.positions)
    check_bounds(s, p)
    residual = flock.velocities - flock.velocities.mean(axis=0)
    return float(np.linalg.norm(residual)) + potential(s, p)


@dataclass(frozen=True)
class DiagnosticsRecord:
    time: float
    energy: float
    dispersion: float
    mean_velocity: np.ndarray
    projected_speed_norm: float
    min_sq_dist: float
    max_sq_dist: float
    avg_distance: float


@dataclass
class DiagnosticsSeries:
    """Column-wise diagnostics of a run, one entry per recorded state.

    ``energy`` is NaN wherever some pair is outside ``(d0, d1)``.
    """

    time: np.ndarray
    energy: np.ndarray
    dispersion: np.ndarray
    mean_velocity: np.ndarray
    projected_speed_norm: np.ndarray
    min_sq_dist: np.ndarray
    max_sq_dist: np.ndarray
    avg_distance: np.ndarray

    COLUMNS = ("t", "energy", "dispersion", "mean_vel_x", "mean_vel_y",
               "min_sq_dist", "max_sq_dist", "avg_distance")

    @classmethod
    def from_states(cls, times, positions, velocities, p: ControlParams) -> DiagnosticsSeries:
        """Evaluate every diagnostic for stacked states of shape ``(n, k, 2)``."""
        positions = np.asarray(positions, dtype=float)
        velocities = np.asarray(velocities, dtype=float)
        k = positions.shape[1]
        first, second = pair_indices(k)
        dx = positions[:, first] - positions[:, second]
        dv = velocities[:, first] - velocities[:, second]
        s = np.einsum("npd,npd->np", dx, dx)
        smin, smax = s.min(axis=1), s.max(axis=1)
        mean = velocities.mean(axis=1)
        residual = np.sqrt(np.einsum("nkd,nkd->n", velocities - mean[:, None], velocities - mean[:, None]))
        inside = (smin > p.d0) & (smax < p.d1)
        e = np.full(len(s), np.nan)
        if inside.any():
            e[inside] = residual[inside] + potential(s[inside], p)
        return cls(np.asarray(times, dtype=float), e,
                   np.sqrt(np.einsum("npd,npd->n", dv, dv) / k), mean, residual,
                   smin, smax, np.sqrt(s).mean(axis=1))

    def __len__(self) -> int:
        return len(self.time)

    def record(self, index: int) -> DiagnosticsRecord:
        return DiagnosticsRecord(float(self.time[index]), float(self.energy[index]),
                                 float(self.dispersion[index]), self.mean_velocity[index].copy(),
                                 float(self.projected_speed_norm[index]),
                                 float(self.min_sq_dist[index]), float(self.max_sq_dist[index]),
                                 float(self.avg_distance[index]))

    def as_table(self) -> np.ndarray:
        """Rows in :attr:`COLUMNS` order."""
        return np.column_stack([self.time, self.energy, self.dispersion, self.mean_velocity,
                                self.min_sq_dist, self.max_sq_dist, self.avg_distance])


def diagnostics_record(flock: FlockState, p: ControlParams) -> DiagnosticsRecord:
    """Diagnostics of one snapshot; ``energy`` is NaN when a pair is out of bounds."""
    series = DiagnosticsSeries.from_states([flock.time], flock.positions[None],
                                           flock.velocities[None], p)
    return series.record(0)


@dataclass
class MonitorVerdict:
    """Outcome of one runtime check.

    ``step_ok`` has one flag per recorded state. Checks with
    ``enforced=False`` are informational and do not affect :func:`monitor_passed`.
    """

    check: str
    passed: bool
    enforced: bool
    step_ok: np.ndarray = field(repr=False)
    first_failure_time: float | None = None
    detail: dict = field(default_factory=dict)


def _verdict(check, ok, times, enforced, **detail) -> MonitorVerdict:
    bad = np.flatnonzero(~ok)
    first = float(times[bad[0]]) if len(bad) else None
    return MonitorVerdict(check, not len(bad), enforced, ok, first, detail)


def monitor(trajectory, *, energy_tol: float = 1e-6, drift_tol: float = 1e-9,
            dispersion_threshold: float = 1e-3) -> list[MonitorVerdict]:
    """Check a (possibly partial) trajectory against the flocking guarantees.

    Four checks are returned in order: ``energy`` (non-increase within
    ``energy_tol`` per step), ``mean_velocity`` (drift at most ``drift_tol``
    per simulated second), ``bounds`` (every pair inside ``(d0, d1)``) and
    ``convergence`` (dispersion below ``dispersion_threshold`` from some time
    on). The guarantees assume a closed, leaderless flock under the proposed
    law, so for any other run only ``bounds`` is enforced.
    """
    spec = trajectory.spec
    p = spec.params
    diag = trajectory.diagnostics
    t = diag.time
    closed = spec.leader_script is None and spec.law.value == "proposed"

    e = diag.energy
    energy_ok = np.ones(len(t), dtype=bool)
    energy_ok[1:] = e[1:] <= e[:-1] + energy_tol
    energy_ok &= np.isfinite(e)
    total_decrease = float(e[0] - e[-1]) if len(e) else 0.0

    drift = np.linalg.norm(diag.mean_velocity - diag.mean_velocity[0], axis=1)
    drift_ok = drift <= drift_tol * (t - t[0])

    bounds_ok = (diag.min_sq_dist > p.d0) & (diag.max_sq_dist < p.d1)

    below = diag.dispersion < dispersion_threshold
    crossing = np.flatnonzero(below)
    above = np.flatnonzero(~below)
    settled = below[-1] if len(below) else False
    settle_index = (above[-1] + 1) if len(above) else 0
    convergence = MonitorVerdict(
        "convergence", bool(settled), closed, below,
        None if settled else (float(t[above[-1]]) if len(above) else None),
        {"threshold": dispersion_threshold,
         "first_crossing_time": float(t[crossing[0]]) if len(crossing) else None,
         "settle_time": float(t[settle_index]) if settled else None})

    return [
        _verdict("energy", energy_ok, t, closed, total_decrease=total_decrease),
        _verdict("mean_velocity", drift_ok, t, closed, max_drift=float(drift.max())),
        _verdict("bounds", bounds_ok, t, True),
        convergence,
    ]


def monitor_passed(verdicts) -> bool:
    return all(v.passed for v in verdicts if v.enforced)
