"""
Model parameters and objective specifications.
"""

from typing import Any, Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from typing_extensions import Self

from .base import ARRAY_MODEL_CONFIG, StrEnum, as_vector
from .degradation import ConstantDegradation, DegradationFunction
from .grid import Trajectory
from .norms import h1_inner


class ModelParams(BaseModel):
    """
    Energy curvature, viscosity, history seed and degradation function.

    ``epsilon == 0`` selects the rate-independent model.
    """

    model_config = ARRAY_MODEL_CONFIG

    alpha: float = Field(..., gt=0, description="Curvature of the stored energy")
    epsilon: float = Field(default=0.0, ge=0, description="Viscosity; 0 means rate-independent")
    y0: np.ndarray = Field(..., description="History seed in R^n")
    kappa: DegradationFunction = Field(
        default_factory=lambda: ConstantDegradation(value=0.0),
        description="Degradation function, applied componentwise",
    )

    @field_validator("y0", mode="before")
    @classmethod
    def coerce_y0(cls, v: Any) -> np.ndarray:
        arr = as_vector(v, "y0").copy()
        arr.setflags(write=False)
        return arr

    @field_validator("kappa", mode="before")
    @classmethod
    def coerce_kappa(cls, v: Any) -> DegradationFunction:
        if isinstance(v, dict):
            return DegradationFunction.from_dict(v)
        return v

    @property
    def n(self) -> int:
        return self.y0.shape[0]

    @property
    def is_viscous(self) -> bool:
        return self.epsilon > 0

    def with_epsilon(self, epsilon: float) -> "ModelParams":
        """Copy with a different viscosity (validated)."""
        return ModelParams(alpha=self.alpha, epsilon=epsilon, y0=self.y0, kappa=self.kappa)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "y0": self.y0.tolist(),
            "kappa": self.kappa.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelParams":
        return cls(**data)


class JKind(StrEnum):
    """Running cost j(q) of the objective."""
    QUADRATIC_TRACKING = "quadratic_tracking"
    LINEAR = "linear"
    ZERO = "zero"


class ObjectiveSpec(BaseModel):
    """
    Objective data: running cost j, terminal target q_d and the optional
    proximal anchor.

    The running cost is integrated with the left rectangle rule,
    sum_{k<N} dt * j(q_k), so its derivative enters the adjoint at the left
    node of each interval.

    - quadratic_tracking: j(q) = (w/2) |q - target|^2
    - linear: j(q) = <c, q>
    - zero: j = 0
    """

    model_config = ARRAY_MODEL_CONFIG

    j_kind: JKind = Field(default=JKind.ZERO, description="Kind of running cost")
    q_d: np.ndarray = Field(..., description="Terminal target in R^n")
    tracking_target: Optional[Trajectory] = Field(default=None, description="Target of the tracking cost")
    tracking_weight: float = Field(default=1.0, ge=0, description="Weight w of the tracking cost")
    linear_weights: Optional[np.ndarray] = Field(default=None, description="Weights c of the linear cost")
    proximal_anchor: Optional[Trajectory] = Field(default=None, description="Anchor of the proximal term")
    include_proximal: bool = Field(default=False, description="Add (1/2)||ell - anchor||_{H^1}^2")

    @field_validator("j_kind", mode="before")
    @classmethod
    def validate_j_kind(cls, v: Union[JKind, str]) -> JKind:
        if isinstance(v, str):
            try:
                return JKind(v)
            except ValueError:
                raise ValueError(f"Invalid j_kind: {v}")
        return v

    @field_validator("q_d", mode="before")
    @classmethod
    def coerce_q_d(cls, v: Any) -> np.ndarray:
        arr = as_vector(v, "q_d").copy()
        arr.setflags(write=False)
        return arr

    @field_validator("linear_weights", mode="before")
    @classmethod
    def coerce_weights(cls, v: Any) -> Optional[np.ndarray]:
        if v is None:
            return None
        arr = as_vector(v, "linear_weights").copy()
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def validate_kind_data(self) -> Self:
        n = self.n
        if self.j_kind == JKind.QUADRATIC_TRACKING:
            if self.tracking_target is None:
                raise ValueError("quadratic_tracking requires a tracking_target")
            if self.tracking_target.n != n or self.tracking_target.per_interval:
                raise ValueError("tracking_target must be a node trajectory with the dimension of q_d")
        if self.j_kind == JKind.LINEAR:
            if self.linear_weights is None or self.linear_weights.shape[0] != n:
                raise ValueError("linear cost requires linear_weights with the dimension of q_d")
        if self.include_proximal and self.proximal_anchor is None:
            raise ValueError("include_proximal requires a proximal_anchor")
        if self.proximal_anchor is not None and self.proximal_anchor.n != n:
            raise ValueError("proximal_anchor dimension does not match q_d")
        return self

    @property
    def n(self) -> int:
        return self.q_d.shape[0]

    @property
    def is_affine(self) -> bool:
        """True when j is affine (linear or zero)."""
        return self.j_kind in (JKind.LINEAR, JKind.ZERO)

    def with_anchor(self, anchor: Optional[Trajectory], include_proximal: bool = True) -> "ObjectiveSpec":
        return ObjectiveSpec(
            j_kind=self.j_kind, q_d=self.q_d, tracking_target=self.tracking_target,
            tracking_weight=self.tracking_weight, linear_weights=self.linear_weights,
            proximal_anchor=anchor, include_proximal=include_proximal and anchor is not None,
        )

    def j_values(self, q: np.ndarray) -> np.ndarray:
        """Pointwise j(q_k) for node values q of shape (N+1, n)."""
        if self.j_kind == JKind.QUADRATIC_TRACKING:
            diff = q - self.tracking_target.values
            return 0.5 * self.tracking_weight * np.sum(diff * diff, axis=1)
        if self.j_kind == JKind.LINEAR:
            return q @ self.linear_weights
        return np.zeros(q.shape[0])

    def j_prime(self, q: np.ndarray) -> np.ndarray:
        """Pointwise gradient j'(q_k), shape (N+1, n)."""
        if self.j_kind == JKind.QUADRATIC_TRACKING:
            return self.tracking_weight * (q - self.tracking_target.values)
        if self.j_kind == JKind.LINEAR:
            return np.tile(self.linear_weights, (q.shape[0], 1))
        return np.zeros_like(q)

    def running_cost(self, q: Trajectory) -> float:
        """Left-rectangle quadrature of j over [0, T]."""
        return float(q.grid.dt * np.sum(self.j_values(q.values)[:-1]))

    def terminal_cost(self, q: Trajectory) -> float:
        diff = q.values[-1] - self.q_d
        return 0.5 * float(diff @ diff)

    def evaluate(self, q: Trajectory, ell: Trajectory) -> float:
        """j(q) + (1/2)|q(T) - q_d|^2 + (1/2)||ell||_H1^2 [+ (1/2)||ell - anchor||_H1^2]."""
        value = self.running_cost(q) + self.terminal_cost(q) + 0.5 * h1_inner(ell, ell)
        if self.include_proximal:
            diff = ell - self.proximal_anchor
            value += 0.5 * h1_inner(diff, diff)
        return value
