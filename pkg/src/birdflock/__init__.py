"""Bounded-distance flocking: control laws, simulation and invariant monitors."""

from .core import (
    AgentState,
    ControlLawKind,
    ControlParams,
    ConvergenceWarning,
    DistanceBoundViolation,
    FlockState,
    ParameterError,
    SaturationLimits,
    alignment_weight,
    baseline_control_input,
    cohesion_kernel,
    control_input,
    control_inputs,
    repulsion_kernel,
    squared_distance,
    velocity_dispersion,
)
from .diagnostics import (
    DiagnosticsRecord,
    LaplacianPair,
    MonitorVerdict,
    build_laplacians,
    diagnostics_record,
    energy,
    laplacian_form_inputs,
    monitor,
    monitor_passed,
    project_velocity,
)
from .dynamics import (
    InitialAgent,
    IntegratorConfig,
    LeaderScript,
    ScenarioSpec,
    Trajectory,
    VicsekConfig,
    ViolationReport,
    initial_state,
    leader_input,
    polar_to_velocity,
    run,
    saturate,
    step,
)
from .scenarios import leader_follower2, leaderless3

__version__ = "0.1.0"
