"""Flat ``key = value`` run configuration.

Keys carry a section prefix::

    scenario.name = leaderless3        # leaderless3 | leader_follower2 | custom
    scenario.law = proposed            # proposed | model1 | model2 | model3 | all
    scenario.preset = simulation       # simulation | realistic
    params.sigma = 1                   # also: beta theta K d0 d1 delta (alpha = sigma)
    integrator.scheme = rk4            # also: dt duration
    limits.enabled = false             # also: a_max v_max
    leader.enabled = true              # also: switch_time amplitude
    vicsek.radius = 1.5                # also: period
    diagnostics.convergence_threshold = 1e-3
    output.dir = flock_output
    initial.0 = 0, 0, 45, 0.54         # x, y, orientation_deg, speed

``#`` starts a comment. Later sources override earlier ones: file, then
``--set`` pairs, then dedicated command-line flags.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

from .core import ControlLawKind, ControlParams, ParameterError, SaturationLimits
from .dynamics import (
    InitialAgent,
    IntegratorConfig,
    LeaderScript,
    ScenarioSpec,
    VicsekConfig,
)
from .scenarios import LEADER_FOLLOWER2_INITIAL, LEADERLESS3_INITIAL, PRESETS, SCENARIOS

ALL_LAWS = tuple(ControlLawKind)

KNOWN_KEYS = {
    "scenario.name", "scenario.law", "scenario.preset",
    "params.sigma", "params.alpha", "params.beta", "params.theta", "params.K",
    "params.d0", "params.d1", "params.delta",
    "integrator.scheme", "integrator.dt", "integrator.duration",
    "limits.enabled", "limits.a_max", "limits.v_max",
    "leader.enabled", "leader.switch_time", "leader.amplitude",
    "vicsek.radius", "vicsek.period",
    "diagnostics.convergence_threshold",
    "output.dir",
}
_INITIAL_KEY = re.compile(r"^initial\.(\d+)$")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    laws: tuple[ControlLawKind, ...]
    preset: str
    params: ControlParams
    integrator: IntegratorConfig
    limits: SaturationLimits
    leader: LeaderScript | None
    vicsek: VicsekConfig
    initial: tuple[InitialAgent, ...]
    convergence_threshold: float
    output_dir: Path

    @property
    def compare(self) -> bool:
        return len(self.laws) > 1

    def scenario_spec(self, law: ControlLawKind) -> ScenarioSpec:
        return ScenarioSpec(law, self.params, self.initial, self.integrator, self.limits,
                            self.leader, self.vicsek)

    def as_pairs(self) -> list[tuple[str, str]]:
        """Fully resolved configuration as ``(key, value)`` pairs, in a fixed order."""
        p = self.params
        law = "all" if self.compare else self.laws[0].value
        pairs = [
            ("scenario.name", self.scenario), ("scenario.law", law),
            ("scenario.preset", self.preset),
            ("params.sigma", p.sigma), ("params.beta", p.beta), ("params.theta", p.theta),
            ("params.K", p.K), ("params.d0", p.d0), ("params.d1", p.d1),
            ("params.delta", p.delta),
            ("integrator.scheme", self.integrator.scheme), ("integrator.dt", self.integrator.dt),
            ("integrator.duration", self.integrator.duration),
            ("limits.enabled", self.limits.enabled), ("limits.a_max", self.limits.a_max),
            ("limits.v_max", self.limits.v_max),
            ("leader.enabled", self.leader is not None),
        ]
        if self.leader is not None:
            pairs += [("leader.switch_time", self.leader.switch_time),
                      ("leader.amplitude", self.leader.amplitude)]
        pairs += [("vicsek.radius", self.vicsek.radius), ("vicsek.period", self.vicsek.period),
                  ("diagnostics.convergence_threshold", self.convergence_threshold)]
        pairs += [(f"initial.{i}", ", ".join(repr(float(c)) for c in a))
                  for i, a in enumerate(self.initial)]
        return [(k, str(v).lower() if isinstance(v, bool) else str(v)) for k, v in pairs]


def parse_pairs(lines, source: str = "config") -> dict[str, str]:
    raw = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(line, f"{source} line {lineno}: expected key = value")
        raw[key.strip()] = value.strip()
    return raw


def _number(raw: dict, key: str, default=None):
    if key not in raw:
        return default
    try:
        value = float(raw[key])
    except ValueError:
        raise ConfigError(key, f"not a number: {raw[key]!r}") from None
    if not math.isfinite(value):
        raise ConfigError(key, f"must be finite, got {raw[key]!r}")
    return value


def _flag(raw: dict, key: str, default: bool) -> bool:
    if key not in raw:
        return default
    value = raw[key].lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"not a boolean: {raw[key]!r}")


def _initial(raw: dict, default) -> tuple[InitialAgent, ...]:
    entries = {}
    for key, value in raw.items():
        match = _INITIAL_KEY.match(key)
        if match is None:
            continue
        try:
            fields = [float(v) for v in value.replace(";", ",").split(",")]
        except ValueError:
            raise ConfigError(key, f"expected x, y, orientation_deg, speed; got {value!r}") from None
        if len(fields) != 4:
            raise ConfigError(key, f"expected 4 values (x, y, orientation_deg, speed), got {len(fields)}")
        entries[int(match.group(1))] = InitialAgent(*fields)
    if not entries:
        return default
    if sorted(entries) != list(range(len(entries))):
        raise ConfigError("initial", f"agent indices must be 0..{len(entries) - 1}")
    return tuple(entries[i] for i in range(len(entries)))


def resolve(raw: dict[str, str]) -> RunConfig:
    """Build a validated :class:`RunConfig` from raw string pairs."""
    for key in raw:
        if key not in KNOWN_KEYS and not _INITIAL_KEY.match(key):
            raise ConfigError(key, "unknown key")

    scenario = raw.get("scenario.name", "leaderless3")
    if scenario not in SCENARIOS:
        raise ConfigError("scenario.name", f"expected one of {SCENARIOS}, got {scenario!r}")
    law_name = raw.get("scenario.law", "proposed")
    if law_name == "all":
        laws = ALL_LAWS
    else:
        try:
            laws = (ControlLawKind.parse(law_name),)
        except ParameterError as exc:
            raise ConfigError("scenario.law", str(exc)) from None
    preset = raw.get("scenario.preset", "simulation")
    if preset not in PRESETS:
        raise ConfigError("scenario.preset", f"expected one of {tuple(PRESETS)}, got {preset!r}")

    base = PRESETS[preset]
    sigma = _number(raw, "params.sigma")
    alpha = _number(raw, "params.alpha")
    if alpha is not None:
        warnings.warn("params.alpha is a deprecated alias of params.sigma",
                      DeprecationWarning, stacklevel=2)
        if sigma is not None and sigma != alpha:
            raise ConfigError("params.alpha", "conflicts with params.sigma")
        sigma = alpha
    values = {
        "sigma": base.sigma if sigma is None else sigma,
        "beta": _number(raw, "params.beta", base.beta),
        "theta": _number(raw, "params.theta", base.theta),
        "K": _number(raw, "params.K", base.K),
        "d0": _number(raw, "params.d0", base.d0),
        "d1": _number(raw, "params.d1", base.d1),
        "delta": _number(raw, "params.delta", base.delta),
    }
    try:
        params = ControlParams(**values)
        integrator = IntegratorConfig(raw.get("integrator.scheme", "rk4"),
                                      _number(raw, "integrator.dt", 0.01),
                                      _number(raw, "integrator.duration", 250.0))
        limits = SaturationLimits(_number(raw, "limits.a_max", 2.5),
                                  _number(raw, "limits.v_max", 0.5),
                                  _flag(raw, "limits.enabled", False))
        leader = None
        if _flag(raw, "leader.enabled", scenario == "leader_follower2"):
            leader = LeaderScript(_number(raw, "leader.switch_time", 125.0),
                                  _number(raw, "leader.amplitude", 1.0))
        vicsek = VicsekConfig(_number(raw, "vicsek.radius", 1.5),
                              _number(raw, "vicsek.period", 1.0))
    except ParameterError as exc:
        raise ConfigError(_section_key(raw, exc.key), str(exc)) from None

    default_initial = {"leaderless3": LEADERLESS3_INITIAL,
                       "leader_follower2": LEADER_FOLLOWER2_INITIAL}.get(scenario)
    initial = _initial(raw, default_initial)
    if initial is None:
        raise ConfigError("initial", "the custom scenario needs initial.<i> entries")

    threshold = _number(raw, "diagnostics.convergence_threshold", 1e-3)
    if threshold <= 0:
        raise ConfigError("diagnostics.convergence_threshold", "must be positive")

    config = RunConfig(scenario, laws, preset, params, integrator, limits, leader, vicsek,
                       initial, threshold, Path(raw.get("output.dir", "flock_output")))
    for law in laws:
        try:
            config.scenario_spec(law)
        except ParameterError as exc:
            raise ConfigError(_section_key(raw, exc.key), str(exc)) from None
    return config


_SECTIONS = {"params": ("sigma", "beta", "theta", "K", "d0", "d1", "delta"),
             "integrator": ("scheme", "dt", "duration"),
             "limits": ("a_max", "v_max"),
             "leader": ("switch_time", "amplitude"),
             "vicsek": ("radius", "period")}


def _section_key(raw: dict, name: str) -> str:
    if name == "sigma" and "params.alpha" in raw:
        return "params.alpha"
    for section, names in _SECTIONS.items():
        if name in names:
            return f"{section}.{name}"
    return name


def load_config(path: str | Path | None = None, overrides=(), **flags) -> RunConfig:
    """Resolve a configuration from an optional file, ``key=value`` overrides and flags.

    ``flags`` are keyword shortcuts: ``scenario``, ``law``, ``dt``,
    ``duration`` and ``out``; ``None`` values are ignored.
    """
    raw = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        raw.update(parse_pairs(text.splitlines(), str(path)))
    if isinstance(overrides, dict):
        raw.update({k: str(v) for k, v in overrides.items()})
    else:
        raw.update(parse_pairs(overrides, "--set"))
    shortcuts = {"scenario": "scenario.name", "law": "scenario.law", "dt": "integrator.dt",
                 "duration": "integrator.duration", "out": "output.dir"}
    for name, value in flags.items():
        if name not in shortcuts:
            raise TypeError(f"unknown flag {name!r}")
        if value is not None:
            raw[shortcuts[name]] = str(value)
    return resolve(raw)
