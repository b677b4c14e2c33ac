"""
rioc - rate-independent evolutions with history, viscous regularization and
optimal control.

Basic Usage:
    from rioc import ScenarioBuilder, solve

    scenario = (
        ScenarioBuilder("play")
        .alpha(2.0)
        .degradation_constant(0.5)
        .horizon(T=2.0, N=2000)
        .control_ramp([1.0])
        .build()
    )
    sol = solve(scenario.to_params(), scenario.control_trajectory(), scenario.grid)

Advanced Usage:
    from rioc.model import ModelParams, ObjectiveSpec, Trajectory
    from rioc.optimizer import minimize_viscous, vanishing_viscosity_sweep
    from rioc.stationarity import check_viscous, check_limit
"""

__version__ = "0.1.0"

from .adjoint import AdjointSolution, gradient_check, reduced_gradient, solve_adjoint
from .errors import LineSearchError, RiocError, SolverError, ValidationError
from .forward import (
    ForwardSolution,
    energy_balance_residual,
    solve,
    solve_rate_independent,
    solve_viscous,
)
from .optimizer import (
    OptimizationResult,
    OptimizeOptions,
    SweepReport,
    minimize_viscous,
    vanishing_viscosity_sweep,
)
from .scenario import Scenario
from .scenario_builder import ScenarioBuilder
from .sensitivity import directional_derivative
from .stationarity import StationarityReport, StationarityType, check_limit, check_viscous

__all__ = [
    "AdjointSolution",
    "ForwardSolution",
    "LineSearchError",
    "OptimizationResult",
    "OptimizeOptions",
    "RiocError",
    "Scenario",
    "ScenarioBuilder",
    "SolverError",
    "StationarityReport",
    "StationarityType",
    "SweepReport",
    "ValidationError",
    "check_limit",
    "check_viscous",
    "directional_derivative",
    "energy_balance_residual",
    "gradient_check",
    "minimize_viscous",
    "reduced_gradient",
    "solve",
    "solve_adjoint",
    "solve_rate_independent",
    "solve_viscous",
    "vanishing_viscosity_sweep",
]
