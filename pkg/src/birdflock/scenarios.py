"""Built-in simulation scenarios.

``leaderless3``: three agents starting roughly on an equilateral triangle,
each heading toward the group center.

``leader_follower2``: agent 0 follows the scripted sinusoidal acceleration
and agent 1 runs the control law.
"""

from __future__ import annotations

from .core import ControlLawKind, ControlParams
from .dynamics import InitialAgent, IntegratorConfig, LeaderScript, ScenarioSpec

SIMULATION_PARAMS = ControlParams(sigma=1.0, beta=0.5, theta=2, K=1.0, d0=1.0, d1=2.25)

# values used on the physical two-UAV platform
REALISTIC_PARAMS = ControlParams(sigma=1.0, beta=0.25, theta=2, K=1.0, d0=1.0, d1=8.0)

LEADERLESS3_INITIAL = (
    InitialAgent(0.0, 0.0, 45.0, 0.54),
    InitialAgent(1.25, 0.0, 135.0, 0.42),
    InitialAgent(0.63, 1.08, 270.0, 0.99),
)

LEADER_FOLLOWER2_INITIAL = (
    InitialAgent(0.0, 1.32, 118.0, 0.88),
    InitialAgent(0.0, 0.0, 92.0, 0.50),
)

PRESETS = {"simulation": SIMULATION_PARAMS, "realistic": REALISTIC_PARAMS}
SCENARIOS = ("leaderless3", "leader_follower2", "custom")


def leaderless3(law=ControlLawKind.PROPOSED, params: ControlParams = SIMULATION_PARAMS,
                integrator: IntegratorConfig = IntegratorConfig(), **kwargs) -> ScenarioSpec:
    return ScenarioSpec(law, params, LEADERLESS3_INITIAL, integrator, **kwargs)


def leader_follower2(law=ControlLawKind.PROPOSED, params: ControlParams | None = None,
                     integrator: IntegratorConfig = IntegratorConfig(),
                     preset: str = "simulation", leader_script: LeaderScript = LeaderScript(),
                     **kwargs) -> ScenarioSpec:
    """Leader-follower pair. ``preset="realistic"`` selects the platform gains."""
    if params is None:
        params = PRESETS[preset]
    return ScenarioSpec(law, params, LEADER_FOLLOWER2_INITIAL, integrator,
                        leader_script=leader_script, **kwargs)
