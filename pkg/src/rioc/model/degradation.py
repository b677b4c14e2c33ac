"""
Degradation functions kappa: R -> [0, inf).

kappa turns accumulated fatigue (the history of the state) into the current
activation threshold. It acts componentwise on vectors. Concrete kinds register
themselves with ``@register_degradation`` so scenarios can select them by name.
"""

from enum import Enum
from typing import Any, Dict, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_serializer, model_validator
from typing_extensions import Self

DEGRADATION_REGISTRY: Dict["DegradationKind", type] = {}


def register_degradation(kind):
    def wrapper(cls):
        DEGRADATION_REGISTRY[kind] = cls
        return cls
    return wrapper


class DegradationKind(str, Enum):
    """Builtin degradation kinds."""
    CONSTANT = "constant"
    AFFINE = "affine"
    SATURATING = "saturating"

    def __str__(self):
        return self.value


ArrayLike = Union[float, np.ndarray]


class DegradationFunction(BaseModel):
    """
    Base class of all degradation functions.

    Subclasses implement ``eval``, ``deriv`` and ``deriv2`` on numpy arrays
    and expose the global Lipschitz constant of ``eval``.
    """

    model_config = ConfigDict(frozen=True)

    @property
    def kind(self) -> DegradationKind:
        for kind, registered_class in DEGRADATION_REGISTRY.items():
            if registered_class is type(self):
                return kind
        raise ValueError(f"Degradation class {type(self).__name__} not found in DEGRADATION_REGISTRY")

    @property
    def lipschitz_const(self) -> float:
        raise NotImplementedError

    @property
    def is_affine(self) -> bool:
        return False

    def eval(self, x: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    def deriv(self, x: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    def deriv2(self, x: ArrayLike) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self.eval(x)

    def to_dict(self) -> Dict[str, Any]:
        params = {name: getattr(self, name) for name in type(self).model_fields}
        return {"kind": self.kind.value, **params}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DegradationFunction":
        """Create the registered degradation function named by ``data['kind']``."""
        data = dict(data)
        try:
            kind = DegradationKind(data.pop("kind"))
        except KeyError:
            raise ValueError("degradation spec needs a 'kind' entry")
        kappa_cls = DEGRADATION_REGISTRY[kind]
        return kappa_cls(**data)

    @model_serializer
    def ser_model(self) -> Dict[str, Any]:
        return self.to_dict()


@register_degradation(DegradationKind.CONSTANT)
class ConstantDegradation(DegradationFunction):
    """kappa(x) = value; history has no influence (play operator)."""

    value: float = Field(..., ge=0, description="Constant activation threshold")

    @property
    def lipschitz_const(self) -> float:
        return 0.0

    @property
    def is_affine(self) -> bool:
        return True

    def eval(self, x: ArrayLike) -> np.ndarray:
        return np.full_like(np.asarray(x, dtype=float), self.value)

    def deriv(self, x: ArrayLike) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))

    def deriv2(self, x: ArrayLike) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))


@register_degradation(DegradationKind.AFFINE)
class AffineDegradation(DegradationFunction):
    """
    kappa(x) = a + b*x.

    Nonnegativity only holds on the half-line where a + b*x >= 0; with b >= 0
    and a + b*y0 >= 0 this covers every history value (H is nondecreasing).
    """

    a: float = Field(..., description="Offset")
    b: float = Field(..., description="Slope")

    @property
    def lipschitz_const(self) -> float:
        return abs(self.b)

    @property
    def is_affine(self) -> bool:
        return True

    def eval(self, x: ArrayLike) -> np.ndarray:
        return self.a + self.b * np.asarray(x, dtype=float)

    def deriv(self, x: ArrayLike) -> np.ndarray:
        return np.full_like(np.asarray(x, dtype=float), self.b)

    def deriv2(self, x: ArrayLike) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))


@register_degradation(DegradationKind.SATURATING)
class SaturatingDegradation(DegradationFunction):
    """
    kappa(x) = base -/+ L*s*tanh(x/s).

    Smooth, bounded and Lipschitz with constant L. ``softening`` selects the
    minus sign (toughness decreases with fatigue).
    """

    base: float = Field(..., ge=0, description="Threshold at zero history")
    lipschitz: float = Field(..., ge=0, description="Lipschitz constant L")
    scale: float = Field(default=1.0, gt=0, description="Saturation scale s")
    softening: bool = Field(default=True, description="Threshold decreases with accumulated history")

    @model_validator(mode="after")
    def validate_nonnegative(self) -> Self:
        if self.base < self.lipschitz * self.scale:
            raise ValueError(
                f"base={self.base} must be >= lipschitz*scale={self.lipschitz * self.scale} "
                "to keep kappa nonnegative"
            )
        return self

    @property
    def _amplitude(self) -> float:
        sign = -1.0 if self.softening else 1.0
        return sign * self.lipschitz * self.scale

    @property
    def lipschitz_const(self) -> float:
        return self.lipschitz

    def eval(self, x: ArrayLike) -> np.ndarray:
        return self.base + self._amplitude * np.tanh(np.asarray(x, dtype=float) / self.scale)

    def deriv(self, x: ArrayLike) -> np.ndarray:
        sech2 = 1.0 / np.cosh(np.asarray(x, dtype=float) / self.scale) ** 2
        return (self._amplitude / self.scale) * sech2

    def deriv2(self, x: ArrayLike) -> np.ndarray:
        u = np.asarray(x, dtype=float) / self.scale
        return -2.0 * (self._amplitude / self.scale ** 2) * np.tanh(u) / np.cosh(u) ** 2
