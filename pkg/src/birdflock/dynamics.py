"""Fixed-step integration of flock scenarios.

A scenario is integrated as the coupled system ``x' = v, v' = u(t, x, v)``
with explicit Euler or classical RK4. The Vicsek baseline is a discrete
heading rule and is advanced kinematically instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    ControlLawKind,
    ControlParams,
    DistanceBoundViolation,
    FlockState,
    ParameterError,
    SaturationLimits,
    check_bounds,
    pair_accelerations,
    pairwise_squared_distances,
)
from .diagnostics import DiagnosticsSeries

GUARD = 1e-9
SCHEMES = ("rk4", "euler")


@dataclass(frozen=True)
class IntegratorConfig:
    scheme: str = "rk4"
    dt: float = 0.01
    duration: float = 250.0

    def __post_init__(self):
        scheme = str(self.scheme).lower()
        if scheme not in SCHEMES:
            raise ParameterError("scheme", f"expected one of {SCHEMES}, got {self.scheme!r}")
        object.__setattr__(self, "scheme", scheme)
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ParameterError("dt", f"must be positive, got {self.dt!r}")
        if not (math.isfinite(self.duration) and self.duration >= self.dt):
            raise ParameterError("duration", f"must be at least dt, got {self.duration!r}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.duration / self.dt)))


@dataclass(frozen=True)
class LeaderScript:
    """Piecewise sinusoidal acceleration of the leader (agent 0).

    ``amplitude * (sin, cos)(pi t / 180)`` before ``switch_time`` and its
    negation from ``switch_time`` on.
    """

    switch_time: float = 125.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.switch_time > 0:
            raise ParameterError("switch_time", f"must be positive, got {self.switch_time!r}")


@dataclass(frozen=True)
class VicsekConfig:
    """Interaction radius (m) and heading-update period (s) of the Vicsek baseline."""

    radius: float = 1.5
    period: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError("radius", f"must be positive, got {self.radius!r}")
        if not self.period > 0:
            raise ParameterError("period", f"must be positive, got {self.period!r}")


class InitialAgent(NamedTuple):
    x: float
    y: float
    orientation_deg: float
    speed: float


@dataclass(frozen=True)
class ScenarioSpec:
    law: ControlLawKind
    params: ControlParams
    initial: tuple[InitialAgent, ...]
    integrator: IntegratorConfig = IntegratorConfig()
    limits: SaturationLimits = SaturationLimits()
    leader_script: LeaderScript | None = None
    vicsek: VicsekConfig = VicsekConfig()

    def __post_init__(self):
        object.__setattr__(self, "law", ControlLawKind.parse(self.law))
        initial = tuple(InitialAgent(*map(float, a)) for a in self.initial)
        object.__setattr__(self, "initial", initial)
        if len(initial) < 2:
            raise ParameterError("initial", "a scenario needs at least two agents")
        if any(a.speed < 0 for a in initial):
            raise ParameterError("initial", "speeds must be non-negative")
        if self.law is ControlLawKind.PROPOSED:
            self.params.require_even_theta()
        s = pairwise_squared_distances(np.array([(a.x, a.y) for a in initial]))
        try:
            check_bounds(s, self.params)
        except DistanceBoundViolation as exc:
            raise ParameterError(
                "initial", f"initial squared distance {exc.sq_dist:.6g} of pair {exc.pair} "
                f"is outside ({self.params.d0}, {self.params.d1})") from None
        if self.law.is_discrete:
            ratio = self.vicsek.period / self.integrator.dt
            if abs(ratio - round(ratio)) > 1e-9 * ratio:
                raise ParameterError("period", "Vicsek update period must be a multiple of dt")

    @property
    def k(self) -> int:
        return len(self.initial)

    def replace(self, **changes) -> ScenarioSpec:
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return ScenarioSpec(**values)


def polar_to_velocity(orientation_deg: float, speed: float) -> np.ndarray:
    """Velocity from a heading (degrees, counterclockwise from +x) and a speed."""
    if speed < 0:
        raise ValueError("speed must be non-negative")
    rad = math.radians(orientation_deg)
    return np.array([speed * math.cos(rad), speed * math.sin(rad)])


def leader_input(t: float, script: LeaderScript) -> np.ndarray:
    phase = math.pi * t / 180.0
    sign = 1.0 if t < script.switch_time else -1.0
    return sign * script.amplitude * np.array([math.sin(phase), math.cos(phase)])


def saturate_acceleration(u: np.ndarray, limits: SaturationLimits) -> np.ndarray:
    """Scale rows of ``u`` down to norm ``a_max`` keeping their direction."""
    return _clip_rows(u, limits.a_max) if limits.enabled else u


def clamp_velocity(v: np.ndarray, limits: SaturationLimits) -> np.ndarray:
    return _clip_rows(v, limits.v_max) if limits.enabled else v


def saturate(u: np.ndarray, v: np.ndarray, limits: SaturationLimits):
    """Return ``(u', v')`` with ``|u'| <= a_max`` and ``|v'| <= v_max`` row-wise."""
    return saturate_acceleration(u, limits), clamp_velocity(v, limits)


def _clip_rows(a: np.ndarray, cap: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    norms = np.linalg.norm(a, axis=-1, keepdims=True)
    scale = np.minimum(1.0, cap / np.where(norms > 0, norms, 1.0))
    return a * scale


def initial_state(spec: ScenarioSpec) -> FlockState:
    """State at ``t = 0``. Vicsek followers move at the mean initial speed."""
    positions = [(a.x, a.y) for a in spec.initial]
    speeds = [a.speed for a in spec.initial]
    if spec.law.is_discrete:
        common = float(np.mean(speeds))
        first = 1 if spec.leader_script is not None else 0
        speeds = speeds[:first] + [common] * (len(speeds) - first)
    velocities = [polar_to_velocity(a.orientation_deg, s) for a, s in zip(spec.initial, speeds)]
    return FlockState(0.0, positions, velocities)


class _Stepper:
    """Advances raw ``(x, v)`` arrays by one step of a scenario."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.law = spec.law
        self.p = spec.params
        self.dt = spec.integrator.dt
        self.rk4 = spec.integrator.scheme == "rk4"
        self.limits = spec.limits
        self.leader = spec.leader_script
        self.followers = slice(1 if self.leader is not None else 0, None)
        self.lower = self.law in (ControlLawKind.PROPOSED, ControlLawKind.MODEL3_CUCKER_DONG)
        self.upper = self.law is ControlLawKind.PROPOSED
        if self.law.is_discrete:
            self.update_every = int(round(spec.vicsek.period / self.dt))

    def accel(self, t: float, x: np.ndarray, v: np.ndarray, guard: float = 0.0) -> np.ndarray:
        if self.law.is_discrete:
            u = np.zeros_like(x)
        else:
            u = pair_accelerations(self.law, x, v, self.p, guard)
            if self.limits.enabled:
                u[self.followers] = saturate_acceleration(u[self.followers], self.limits)
        if self.leader is not None:
            u[0] = leader_input(t, self.leader)
        return u

    def vicsek_headings(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Each follower takes the mean heading of agents within the radius (itself included)."""
        speeds = np.linalg.norm(v, axis=1, keepdims=True)
        headings = v / np.where(speeds > 0, speeds, 1.0)
        diff = x[:, None, :] - x[None, :, :]
        near = (np.einsum("ijd,ijd->ij", diff, diff) < self.spec.vicsek.radius ** 2)
        summed = near.astype(float) @ headings
        norms = np.linalg.norm(summed, axis=1, keepdims=True)
        new = np.where(norms > 0, summed / np.where(norms > 0, norms, 1.0), headings)
        out = v.copy()
        out[self.followers] = (speeds * new)[self.followers]
        return out

    def advance(self, n: int, x: np.ndarray, v: np.ndarray, u0: np.ndarray | None = None):
        """One step from ``t = n * dt``; returns the new ``(x, v)``.

        ``u0`` may carry ``accel(t, x, v)`` when the caller already has it.
        Raises :class:`DistanceBoundViolation` when a stage state leaves the
        domain of a kernel the law uses.
        """
        t, dt = n * self.dt, self.dt
        if self.law.is_discrete and n > 0 and n % self.update_every == 0:
            v = self.vicsek_headings(x, v)
        k1 = self.accel(t, x, v) if u0 is None else u0
        if self.rk4:
            h = 0.5 * dt
            v2 = v + h * k1
            k2 = self.accel(t + h, x + h * v, v2)
            v3 = v + h * k2
            k3 = self.accel(t + h, x + h * v2, v3)
            v4 = v + dt * k3
            k4 = self.accel(t + dt, x + dt * v3, v4)
            x_new = x + (dt / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
            v_new = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            x_new = x + dt * v
            v_new = v + dt * k1
        if self.limits.enabled:
            v_new[self.followers] = clamp_velocity(v_new[self.followers], self.limits)
        return x_new, v_new


def step(flock: FlockState, spec: ScenarioSpec) -> FlockState:
    """Advance ``flock`` by one integrator step of ``spec``.

    Only the bounds whose kernels the law uses are enforced, with a guard
    band of ``GUARD``: both for the proposed law, the lower one for Model 3,
    none for Models 1 and 2.
    """
    stepper = _Stepper(spec)
    n = int(round(flock.time / stepper.dt))
    t_new = flock.time + stepper.dt
    try:
        x, v = stepper.advance(n, flock.positions, flock.velocities)
        if stepper.lower or stepper.upper:
            check_bounds(pairwise_squared_distances(x), stepper.p, GUARD,
                         lower=stepper.lower, upper=stepper.upper)
    except DistanceBoundViolation as exc:
        exc.time = t_new
        raise
    return FlockState(t_new, x, v)


@dataclass(frozen=True)
class ViolationReport:
    """A bound breach. ``halted`` means the run stopped because of it."""

    time: float
    pair: tuple[int, int] | None
    bound: str
    sq_dist: float
    halted: bool


@dataclass
class Trajectory:
    """Recorded states of a run.

    ``accelerations[n]`` is the input applied at state ``n``. ``violation``
    is the earliest breach, halting or not; ``halt`` is set when the run
    stopped early, in which case ``completed`` is False.
    """

    spec: ScenarioSpec
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    accelerations: np.ndarray
    diagnostics: DiagnosticsSeries
    violation: ViolationReport | None = None
    halt: ViolationReport | None = None

    @property
    def completed(self) -> bool:
        return self.halt is None

    def __len__(self) -> int:
        return len(self.times)

    def state(self, index: int) -> FlockState:
        return FlockState(self.times[index], self.positions[index], self.velocities[index])

    @property
    def final_state(self) -> FlockState:
        return self.state(-1)


def _first_breach(times, positions, diag: DiagnosticsSeries, p: ControlParams):
    bad = np.flatnonzero(~((diag.min_sq_dist > p.d0) & (diag.max_sq_dist < p.d1)))
    if not len(bad):
        return None
    n = int(bad[0])
    try:
        check_bounds(pairwise_squared_distances(positions[n]), p)
    except DistanceBoundViolation as exc:
        return ViolationReport(float(times[n]), exc.pair, exc.bound, exc.sq_dist, False)
    return None


def run(spec: ScenarioSpec) -> Trajectory:
    """Integrate a scenario over its full horizon.

    A breach of a bound the law has a kernel for halts the run (the law is
    undefined beyond it). Other breaches are reported and the run goes on.
    """
    stepper = _Stepper(spec)
    n_steps = spec.integrator.n_steps
    k = spec.k
    dt = spec.integrator.dt
    times = np.arange(n_steps + 1) * dt
    xs = np.empty((n_steps + 1, k, 2))
    vs = np.empty((n_steps + 1, k, 2))
    us = np.zeros((n_steps + 1, k, 2))

    state = initial_state(spec)
    x, v = state.positions.copy(), state.velocities.copy()
    halt = None
    last = n_steps
    for n in range(n_steps + 1):
        xs[n], vs[n] = x, v
        t = float(times[n])
        try:
            if spec.law.is_discrete:
                if n == n_steps:
                    break
                x_new, v_new = stepper.advance(n, x, v)
                us[n] = (v_new - v) / dt
                if spec.leader_script is not None:
                    us[n, 0] = leader_input(t, spec.leader_script)
            else:
                try:
                    us[n] = stepper.accel(t, x, v, GUARD)
                except DistanceBoundViolation:
                    us[n] = np.nan
                    raise
                if n == n_steps:
                    break
                x_new, v_new = stepper.advance(n, x, v, us[n].copy())
        except DistanceBoundViolation as exc:
            at = t if np.isnan(us[n]).any() else t + dt
            halt = ViolationReport(at, exc.pair, exc.bound, exc.sq_dist, True)
            last = n
            break
        x, v = x_new, v_new

    end = last + 1
    times, xs, vs, us = times[:end], xs[:end], vs[:end], us[:end]
    diag = DiagnosticsSeries.from_states(times, xs, vs, spec.params)
    violation = _first_breach(times, xs, diag, spec.params)
    if halt is not None and (violation is None or halt.time <= violation.time):
        violation = halt
    return Trajectory(spec, times, xs, vs, us, diag, violation, halt)
