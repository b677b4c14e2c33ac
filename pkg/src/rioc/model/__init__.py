"""
rioc model components

Direct access to the data models and discrete operators the solvers are
built from.

Examples:
    from rioc.model import TimeGrid, Trajectory, ModelParams, ConstantDegradation

    grid = TimeGrid(T=1.0, N=100)
    params = ModelParams(alpha=1.0, epsilon=0.1, y0=[0.0], kappa=ConstantDegradation(value=1.0))
    ell = Trajectory.constant(grid, 2.0)
"""

from .degradation import (
    DEGRADATION_REGISTRY,
    AffineDegradation,
    ConstantDegradation,
    DegradationFunction,
    DegradationKind,
    SaturatingDegradation,
    register_degradation,
)
from .grid import TimeGrid, Trajectory, require_same_grid
from .norms import h1_inner, h1_norm, l2_norm, sup_norm, w11_norm
from .operators import history, stored_energy, z_field
from .params import JKind, ModelParams, ObjectiveSpec

__all__ = [
    "DEGRADATION_REGISTRY",
    "AffineDegradation",
    "ConstantDegradation",
    "DegradationFunction",
    "DegradationKind",
    "SaturatingDegradation",
    "register_degradation",
    "TimeGrid",
    "Trajectory",
    "require_same_grid",
    "h1_inner",
    "h1_norm",
    "l2_norm",
    "sup_norm",
    "w11_norm",
    "history",
    "stored_energy",
    "z_field",
    "JKind",
    "ModelParams",
    "ObjectiveSpec",
]
