"""Fluid queues under multiplicative impulses.

Exact trajectories, steady oscillation bounds, cycle averages, and
optimal single-impulse timing for the infinite-server and Erlang-A
fluid models, cross-validated by an adaptive Runge-Kutta oracle.
"""

__version__ = "0.1.0"

from .model import (
    DomainError,
    Dynamics,
    FixedPoints,
    ImpulseMode,
    ImpulseSpec,
    InstabilityError,
    ParameterError,
    Periodic,
    QueueParams,
    RegimeCase,
    Single,
    SteadyBounds,
    UndefinedFixedPointError,
    classify_regime,
    fixed_points,
)
from .linear import LinearCycle, linear_cycle, linear_cycle_average, linear_solution, linear_steady_bounds
from .erlang import (
    ErlangSegment,
    capacity_crossing_time,
    erlang_cycle_average,
    erlang_segments,
    erlang_solution,
    erlang_steady_bounds,
)
from .design import (
    BoundaryError,
    Candidate,
    MinimizerError,
    OptimalTimes,
    SubInterval,
    average_queue_length,
    derivative_average,
    derivative_sign_change_root,
    erlang_optimal_times,
    erlang_subintervals,
    linear_optimal_times,
)
from .oracle import (
    BreakpointKind,
    IntegrationError,
    NonConvergenceError,
    OracleConfig,
    Trajectory,
    grid_minimize_impulse_time,
    integrate_impulsive,
    steady_cycle_bounds,
    trajectory_average,
)

__all__ = [
    "BoundaryError",
    "BreakpointKind",
    "Candidate",
    "DomainError",
    "Dynamics",
    "ErlangSegment",
    "FixedPoints",
    "ImpulseMode",
    "ImpulseSpec",
    "InstabilityError",
    "IntegrationError",
    "LinearCycle",
    "MinimizerError",
    "NonConvergenceError",
    "OptimalTimes",
    "OracleConfig",
    "ParameterError",
    "Periodic",
    "QueueParams",
    "RegimeCase",
    "Single",
    "SteadyBounds",
    "SubInterval",
    "Trajectory",
    "UndefinedFixedPointError",
    "average_queue_length",
    "capacity_crossing_time",
    "classify_regime",
    "derivative_average",
    "derivative_sign_change_root",
    "erlang_cycle_average",
    "erlang_optimal_times",
    "erlang_segments",
    "erlang_solution",
    "erlang_steady_bounds",
    "erlang_subintervals",
    "fixed_points",
    "grid_minimize_impulse_time",
    "integrate_impulsive",
    "linear_cycle",
    "linear_cycle_average",
    "linear_optimal_times",
    "linear_solution",
    "linear_steady_bounds",
    "steady_cycle_bounds",
    "trajectory_average",
]
