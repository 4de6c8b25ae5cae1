"""Flock state types, the bounded-distance flocking law and its baselines.

Positions and velocities are stored as ``(k, 2)`` float arrays. A single
planar vector is a length-2 array. Every law here is decentralized in the
sense that agent ``i`` only needs the displacements ``x_i - x_j`` and the
velocity differences ``v_i - v_j``; absolute coordinates never enter.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DIM = 2


class ConvergenceWarning(UserWarning):
    """Parameters outside the range where velocity convergence is guaranteed."""


class ParameterError(ValueError):
    """Invalid control-law or scenario parameter."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class DistanceBoundViolation(ValueError):
    """A pairwise squared distance left the open interval ``(d0, d1)``.

    ``bound`` is ``"lower"`` or ``"upper"``. ``pair`` and ``time`` are filled
    in when the caller knows them.
    """

    def __init__(self, bound: str, sq_dist: float, pair: tuple[int, int] | None = None,
                 time: float | None = None):
        self.bound = bound
        self.sq_dist = float(sq_dist)
        self.pair = pair
        self.time = time
        where = f" for pair {pair}" if pair is not None else ""
        when = f" at t={time:.6g}" if time is not None else ""
        super().__init__(f"{bound} distance bound violated{where}{when}: "
                         f"squared distance {self.sq_dist:.17g}")


class ControlLawKind(enum.Enum):
    PROPOSED = "proposed"
    MODEL1_VICSEK = "model1"
    MODEL2_CUCKER_SMALE = "model2"
    MODEL3_CUCKER_DONG = "model3"

    @classmethod
    def parse(cls, name: str | ControlLawKind) -> ControlLawKind:
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {
            "proposed": cls.PROPOSED,
            "model1": cls.MODEL1_VICSEK, "vicsek": cls.MODEL1_VICSEK,
            "model2": cls.MODEL2_CUCKER_SMALE, "cucker-smale": cls.MODEL2_CUCKER_SMALE,
            "model3": cls.MODEL3_CUCKER_DONG, "cucker-dong": cls.MODEL3_CUCKER_DONG,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ParameterError("law", f"unknown control law {name!r}") from None

    @property
    def is_discrete(self) -> bool:
        return self is ControlLawKind.MODEL1_VICSEK


@dataclass(frozen=True)
class ControlParams:
    """Tunable parameters of the flocking law.

    ``d0`` and ``d1`` bound the *squared* inter-agent distance. ``delta`` is
    the cutoff below ``d1`` used as the upper limit of the energy integrals.
    Defaults are the simulation values (sigma=1, beta=0.5, theta=2, K=1,
    d0=1, d1=2.25).
    """

    sigma: float = 1.0
    beta: float = 0.5
    theta: int = 2
    K: float = 1.0
    d0: float = 1.0
    d1: float = 2.25
    delta: float = 1e-6

    def __post_init__(self):
        for name in ("sigma", "beta", "K", "d0", "d1", "delta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ParameterError(name, f"must be a finite positive number, got {value!r}")
            object.__setattr__(self, name, float(value))
        theta = self.theta
        if isinstance(theta, float) and theta.is_integer():
            theta = int(theta)
        if not isinstance(theta, int) or isinstance(theta, bool) or theta < 1:
            raise ParameterError("theta", f"must be a positive integer, got {self.theta!r}")
        object.__setattr__(self, "theta", theta)
        if not self.d0 < self.d1:
            raise ParameterError("d1", f"must exceed d0 ({self.d1} <= {self.d0})")
        if not self.delta < self.d1 - self.d0:
            raise ParameterError("delta", f"must be smaller than d1 - d0 = {self.d1 - self.d0}")
        if self.beta > 0.5:
            warnings.warn(f"beta={self.beta} > 1/2: velocity convergence is only "
                          "guaranteed for beta <= 1/2", ConvergenceWarning, stacklevel=3)

    def replace(self, **changes) -> ControlParams:
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return ControlParams(**values)

    def require_even_theta(self) -> None:
        # odd theta makes f1 negative below d1, i.e. the cohesion term repels
        if self.theta % 2:
            raise ParameterError("theta", f"the proposed law needs an even theta so that "
                                          f"cohesion attracts; got {self.theta}")


@dataclass(frozen=True)
class SaturationLimits:
    a_max: float = 2.5
    v_max: float = 0.5
    enabled: bool = False

    def __post_init__(self):
        for name in ("a_max", "v_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(name, f"must be a finite positive number, got {value!r}")


def _frozen_array(values, shape_tail=(DIM,)) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 + len(shape_tail) or arr.shape[1:] != shape_tail:
        raise ValueError(f"expected an array of shape (k, {DIM}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("positions and velocities must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AgentState:
    position: np.ndarray
    velocity: np.ndarray


@dataclass(frozen=True)
class FlockState:
    """Snapshot of all agents at one time."""

    time: float
    positions: np.ndarray = field(repr=False)
    velocities: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "time", float(self.time))
        object.__setattr__(self, "positions", _frozen_array(self.positions))
        object.__setattr__(self, "velocities", _frozen_array(self.velocities))
        if self.positions.shape != self.velocities.shape:
            raise ValueError("positions and velocities must have the same shape")
        if len(self.positions) < 2:
            raise ValueError("a flock needs at least two agents")

    @classmethod
    def from_agents(cls, time: float, agents) -> FlockState:
        agents = list(agents)
        return cls(time, [a.position for a in agents], [a.velocity for a in agents])

    @property
    def k(self) -> int:
        return len(self.positions)

    @property
    def agents(self) -> tuple[AgentState, ...]:
        return tuple(AgentState(p, v) for p, v in zip(self.positions, self.velocities))


@lru_cache(maxsize=32)
def pair_indices(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays ``(first, second)`` of the unordered pairs ``i < j``."""
    first, second = np.triu_indices(k, 1)
    first.flags.writeable = False
    second.flags.writeable = False
    return first, second


def squared_distance(a, b) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return float(dx * dx + dy * dy)


def pairwise_squared_distances(positions: np.ndarray) -> np.ndarray:
    """Squared distances over the pairs of :func:`pair_indices`."""
    first, second = pair_indices(len(positions))
    diff = positions[first] - positions[second]
    return np.einsum("pd,pd->p", diff, diff)


def alignment_weight(sq_dist, p: ControlParams):
    """``K / (sigma**2 + sq_dist)**beta``; accepts scalars or arrays."""
    return p.K * (p.sigma * p.sigma + sq_dist) ** (-p.beta)


def _dispersion(velocities: np.ndarray) -> float:
    first, second = pair_indices(len(velocities))
    dv = velocities[first] - velocities[second]
    return math.sqrt(float(np.einsum("pd,pd->", dv, dv)) / len(velocities))


def velocity_dispersion(flock: FlockState) -> float:
    """Root of the summed squared velocity differences over pairs, divided by k.

    Note the division is by the agent count, not the pair count.
    """
    return _dispersion(flock.velocities)


def check_bounds(sq_dists: np.ndarray, p: ControlParams, guard: float = 0.0,
                 lower: bool = True, upper: bool = True) -> None:
    """Raise :class:`DistanceBoundViolation` if any pair leaves ``(d0+guard, d1-guard)``.

    The reported pair is the worst offender, indexed into :func:`pair_indices`.
    """
    if len(sq_dists) == 0:
        return
    if sq_dists.min() > p.d0 + guard and sq_dists.max() < p.d1 - guard:
        return
    k = int(round((1 + math.sqrt(1 + 8 * len(sq_dists))) / 2))
    first, second = pair_indices(k)
    if lower:
        idx = int(np.argmin(sq_dists))
        if not sq_dists[idx] > p.d0 + guard:
            raise DistanceBoundViolation("lower", sq_dists[idx], (int(first[idx]), int(second[idx])))
    if upper:
        idx = int(np.argmax(sq_dists))
        if not sq_dists[idx] < p.d1 - guard:
            raise DistanceBoundViolation("upper", sq_dists[idx], (int(first[idx]), int(second[idx])))


def repulsion_kernel(sq_dist, p: ControlParams):
    """Separation kernel ``(sq_dist - d0)**(-theta)``, diverging at ``d0``."""
    arr = np.asarray(sq_dist, dtype=float)
    if np.any(~(arr > p.d0)):
        raise DistanceBoundViolation("lower", float(np.min(arr)))
    out = (arr - p.d0) ** (-p.theta)
    return float(out) if out.ndim == 0 else out


def cohesion_kernel(sq_dist, p: ControlParams):
    """Cohesion kernel ``(sq_dist - d1)**(-theta)``, diverging at ``d1``."""
    arr = np.asarray(sq_dist, dtype=float)
    if np.any(~(arr < p.d1)):
        raise DistanceBoundViolation("upper", float(np.max(arr)))
    out = (arr - p.d1) ** (-p.theta)
    return float(out) if out.ndim == 0 else out


def pair_accelerations(kind: ControlLawKind, positions: np.ndarray, velocities: np.ndarray,
                       p: ControlParams, guard: float = 0.0) -> np.ndarray:
    """Accelerations of all agents under a continuous-time law, shape ``(k, 2)``.

    Each unordered pair contributes equal and opposite terms, so the
    accelerations sum to zero. Squared distances must lie in
    ``(d0 + guard, d1 - guard)`` for the bounds the law has kernels for.
    The loop runs on Python floats: for the handful of agents simulated
    here, numpy call overhead would dominate.
    """
    xs = positions.tolist()
    vs = velocities.tolist()
    k = len(xs)
    proposed = kind is ControlLawKind.PROPOSED
    repel = proposed or kind is ControlLawKind.MODEL3_CUCKER_DONG
    if not (repel or kind is ControlLawKind.MODEL2_CUCKER_SMALE):
        raise ValueError(f"{kind} has no continuous-time acceleration")
    sig2, K, nbeta, ntheta, d0, d1 = p.sigma * p.sigma, p.K, -p.beta, -p.theta, p.d0, p.d1
    lo, hi = d0 + guard, d1 - guard

    pairs = []
    spread = 0.0
    for i in range(k):
        xi, yi = xs[i]
        vxi, vyi = vs[i]
        for j in range(i + 1, k):
            dx, dy = xi - xs[j][0], yi - xs[j][1]
            dvx, dvy = vxi - vs[j][0], vyi - vs[j][1]
            s = dx * dx + dy * dy
            if repel and not s > lo:
                raise DistanceBoundViolation("lower", s, (i, j))
            if proposed and not s < hi:
                raise DistanceBoundViolation("upper", s, (i, j))
            spread += dvx * dvx + dvy * dvy
            pairs.append((i, j, dx, dy, dvx, dvy, s))
    lam = math.sqrt(spread / k)

    u = [[0.0, 0.0] for _ in range(k)]
    for i, j, dx, dy, dvx, dvy, s in pairs:
        a = K * (sig2 + s) ** nbeta
        if proposed:
            c = lam * ((s - d0) ** ntheta - (s - d1) ** ntheta)
        elif repel:
            c = (s - d0) ** ntheta
        else:
            c = 0.0
        fx = c * dx - a * dvx
        fy = c * dy - a * dvy
        u[i][0] += fx
        u[i][1] += fy
        u[j][0] -= fx
        u[j][1] -= fy
    return np.array(u)


def control_inputs(flock: FlockState, p: ControlParams) -> np.ndarray:
    """Proposed-law accelerations of every agent, shape ``(k, 2)``."""
    return pair_accelerations(ControlLawKind.PROPOSED, flock.positions, flock.velocities, p)


def control_input(flock: FlockState, agent_index: int, p: ControlParams) -> np.ndarray:
    """Proposed-law acceleration of one agent.

    Written from the agent's own viewpoint: relative displacements and
    velocities to each flockmate, plus the flock-wide dispersion scalar,
    which is itself a function of velocity differences only.
    """
    i = agent_index
    x, v = flock.positions, flock.velocities
    rel_x = x[i] - np.delete(x, i, axis=0)
    rel_v = np.delete(v, i, axis=0) - v[i]
    s = np.einsum("jd,jd->j", rel_x, rel_x)
    f0 = repulsion_kernel(s, p)
    f1 = cohesion_kernel(s, p)
    lam = velocity_dispersion(flock)
    alignment = (alignment_weight(s, p)[:, None] * rel_v).sum(axis=0)
    separation = lam * (f0[:, None] * rel_x).sum(axis=0)
    cohesion = lam * (f1[:, None] * -rel_x).sum(axis=0)
    return alignment + separation + cohesion


def baseline_control_input(kind: ControlLawKind, flock: FlockState, agent_index: int,
                           p: ControlParams) -> np.ndarray:
    """Acceleration of one agent under a continuous baseline law.

    Model 2 is velocity alignment only. Model 3 adds the unregulated
    repulsion kernel and has no upper distance bound.
    """
    kind = ControlLawKind.parse(kind)
    if kind is ControlLawKind.PROPOSED:
        return control_input(flock, agent_index, p)
    if kind.is_discrete:
        raise ValueError("model1 is a discrete heading update; see birdflock.dynamics.step")
    i = agent_index
    x, v = flock.positions, flock.velocities
    rel_x = x[i] - np.delete(x, i, axis=0)
    rel_v = np.delete(v, i, axis=0) - v[i]
    s = np.einsum("jd,jd->j", rel_x, rel_x)
    u = (alignment_weight(s, p)[:, None] * rel_v).sum(axis=0)
    if kind is ControlLawKind.MODEL3_CUCKER_DONG:
        u = u + (repulsion_kernel(s, p)[:, None] * rel_x).sum(axis=0)
    return u
