"""
Directional derivative of the viscous solution map.

The derivative dq = S'(ell; v) solves

    eps dq' = max'(z; -alpha dq + v - kappa'(H(q)) H(dq))

where max'(z; h) is h on {z > 0}, 0 on {z < 0} and max(h, 0) on {z = 0}. It
is integrated with the linearization of the forward step, so it is exact for
the discrete solution map away from branch switches.
"""

from enum import IntEnum
from typing import Optional

import numpy as np
from pydantic import BaseModel, field_validator

from .errors import ValidationError
from .forward import ForwardSolution, solve_viscous
from .model.base import ARRAY_MODEL_CONFIG
from .model.grid import Trajectory
from .model.norms import sup_norm
from .model.params import ModelParams


class ActivationLabel(IntEnum):
    """Per-step, per-component classification of the driving force."""
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1

    def __str__(self):
        return self.name.lower()


def default_tol_z(ell: Trajectory) -> float:
    """Width of the zero band, 1e-8 (1 + |ell|_inf)."""
    return 1e-8 * (1.0 + sup_norm(ell))


def classify_z(z, tol_z: float) -> np.ndarray:
    """
    Label every sample of ``z`` (a Trajectory or array) as positive, negative or zero.

    Returns an int8 array of ActivationLabel values with the shape of the samples.
    """
    if tol_z <= 0:
        raise ValueError(f"tol_z must be positive, got {tol_z}")
    values = z.values if isinstance(z, Trajectory) else np.asarray(z, dtype=float)
    labels = np.full(values.shape, ActivationLabel.ZERO, dtype=np.int8)
    labels[values > tol_z] = ActivationLabel.POSITIVE
    labels[values < -tol_z] = ActivationLabel.NEGATIVE
    return labels


class SensitivitySolution(BaseModel):
    """Directional derivative and the activation pattern it was computed on."""

    model_config = ARRAY_MODEL_CONFIG

    dq: Trajectory
    activation_pattern: np.ndarray

    @field_validator("activation_pattern")
    @classmethod
    def validate_pattern(cls, v: np.ndarray) -> np.ndarray:
        if v.ndim != 2:
            raise ValueError("activation_pattern must be (N, n)")
        return v

    @property
    def has_zero_band(self) -> bool:
        return bool(np.any(self.activation_pattern == ActivationLabel.ZERO))


def directional_derivative(params: ModelParams, ell: Trajectory, q: ForwardSolution,
                           v: Trajectory, tol_z: Optional[float] = None) -> SensitivitySolution:
    """S_eps'(ell; v) for the viscous solution ``q`` of ``ell``."""
    if params.epsilon <= 0:
        raise ValidationError(f"directional derivative needs epsilon > 0, got {params.epsilon}")
    grid = q.grid
    if ell.grid != grid or v.grid != grid:
        raise ValidationError("ell, v and the forward solution must share a grid")
    if v.n != params.n:
        raise ValidationError(f"direction has dimension {v.n}, model has n={params.n}")
    tol_z = default_tol_z(ell) if tol_z is None else tol_z
    pattern = classify_z(q.step_drive, tol_z)

    N, dt = grid.N, grid.dt
    alpha, eps = params.alpha, params.epsilon
    denom = eps + alpha * dt
    dkappa = params.kappa.deriv(q.H.values)
    V = v.values
    dq = np.zeros((N + 1, params.n))
    dH = np.zeros((N + 1, params.n))
    positive = pattern == ActivationLabel.POSITIVE
    zero = pattern == ActivationLabel.ZERO

    for k in range(N):
        g = V[k + 1] - dkappa[k] * dH[k]
        active = (eps * dq[k] + dt * g) / denom
        step_up = positive[k] | (zero[k] & (g - alpha * dq[k] > 0))
        dq[k + 1] = np.where(step_up, active, dq[k])
        dH[k + 1] = dH[k] + 0.5 * dt * (dq[k] + dq[k + 1])

    return SensitivitySolution(
        dq=Trajectory(grid=grid, values=dq, zero_initial=True),
        activation_pattern=pattern,
    )


def finite_difference_quotient(params: ModelParams, ell: Trajectory, v: Trajectory,
                               tau: float) -> Trajectory:
    """One-sided quotient (S(ell + tau v) - S(ell)) / tau with the viscous solver."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    base = solve_viscous(params, ell, ell.grid).q
    shifted = solve_viscous(params, ell + tau * v, ell.grid).q
    return (shifted - base) * (1.0 / tau)
