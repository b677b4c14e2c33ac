"""
ScenarioBuilder - fluent API for assembling scenarios in code.

    scenario = (
        ScenarioBuilder("play")
        .alpha(2.0)
        .degradation_constant(0.5)
        .horizon(T=2.0, N=2000)
        .control_ramp([1.0])
        .target([0.5])
        .build()
    )

Settings are collected as given; consistency is checked once, at build().
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from .errors import ValidationError
from .model.degradation import (
    AffineDegradation,
    ConstantDegradation,
    DegradationFunction,
    SaturatingDegradation,
)
from .model.grid import TimeGrid
from .model.params import JKind
from .optimizer import DEFAULT_EPS_LIST
from .scenario import ControlKind, ControlSpec, ObjectiveConfig, OptimizerConfig, Scenario


class ScenarioBuilder:
    """Builder for a Scenario."""

    def __init__(self, name: str = "scenario"):
        self._name = name
        self._alpha: Optional[float] = None
        self._epsilon: Optional[float] = None
        self._y0: Optional[List[float]] = None
        self._kappa: DegradationFunction = ConstantDegradation(value=0.0)
        self._T: Optional[float] = None
        self._N: Optional[int] = None
        self._control = ControlSpec()
        self._objective: Dict[str, Any] = {}
        self._optimizer: Dict[str, Any] = {}
        self._seed = 0
        self._base_dir: Optional[Path] = None

    # Model

    def alpha(self, alpha: float) -> "ScenarioBuilder":
        self._alpha = alpha
        return self

    def viscosity(self, epsilon: Optional[float]) -> "ScenarioBuilder":
        """Viscosity; None or 0 selects the rate-independent problem."""
        self._epsilon = epsilon
        return self

    def history_seed(self, y0: Sequence[float]) -> "ScenarioBuilder":
        self._y0 = [float(v) for v in y0]
        return self

    def degradation(self, kappa: Union[DegradationFunction, Dict[str, Any]]) -> "ScenarioBuilder":
        if isinstance(kappa, dict):
            kappa = DegradationFunction.from_dict(kappa)
        self._kappa = kappa
        return self

    def degradation_constant(self, value: float) -> "ScenarioBuilder":
        return self.degradation(ConstantDegradation(value=value))

    def degradation_affine(self, a: float, b: float) -> "ScenarioBuilder":
        return self.degradation(AffineDegradation(a=a, b=b))

    def degradation_saturating(self, base: float, lipschitz: float, scale: float = 1.0,
                               softening: bool = True) -> "ScenarioBuilder":
        return self.degradation(SaturatingDegradation(base=base, lipschitz=lipschitz,
                                                      scale=scale, softening=softening))

    def horizon(self, T: float, N: int) -> "ScenarioBuilder":
        self._T = T
        self._N = N
        return self

    # Control

    def control_zero(self) -> "ScenarioBuilder":
        self._control = ControlSpec()
        return self

    def control_constant(self, value: Sequence[float]) -> "ScenarioBuilder":
        self._control = ControlSpec(kind=ControlKind.CONSTANT, value=list(value))
        return self

    def control_ramp(self, slope: Sequence[float]) -> "ScenarioBuilder":
        self._control = ControlSpec(kind=ControlKind.RAMP, slope=list(slope))
        return self

    def control_table(self, rows: Sequence[Sequence[float]]) -> "ScenarioBuilder":
        self._control = ControlSpec(kind=ControlKind.TABLE, table=[list(r) for r in rows])
        return self

    def control_file(self, path: Union[str, Path]) -> "ScenarioBuilder":
        path = Path(path)
        self._control = ControlSpec(kind=ControlKind.FILE, path=str(path))
        if path.is_absolute():
            self._base_dir = path.parent
        return self

    # Objective

    def target(self, q_d: Sequence[float]) -> "ScenarioBuilder":
        self._objective["q_d"] = [float(v) for v in q_d]
        return self

    def tracking(self, target: ControlSpec, weight: float = 1.0) -> "ScenarioBuilder":
        self._objective.update(j_kind=JKind.QUADRATIC_TRACKING, tracking_target=target, tracking_weight=weight)
        return self

    def linear_cost(self, weights: Sequence[float]) -> "ScenarioBuilder":
        self._objective.update(j_kind=JKind.LINEAR, linear_weights=list(weights))
        return self

    def proximal(self, anchor: Optional[ControlSpec] = None) -> "ScenarioBuilder":
        self._objective.update(include_proximal=True, anchor=anchor)
        return self

    # Optimizer

    def descent(self, **settings: Any) -> "ScenarioBuilder":
        """Optimizer settings (max_iters, c1, backtrack, initial_step, max_halvings, grad_tol)."""
        self._optimizer.update(settings)
        return self

    def sweep(self, eps_list: Sequence[float] = DEFAULT_EPS_LIST, warm_start: bool = True) -> "ScenarioBuilder":
        self._optimizer.update(eps_list=[float(e) for e in eps_list], warm_start=warm_start)
        return self

    def start_from(self, control: ControlSpec) -> "ScenarioBuilder":
        self._optimizer["initial_control"] = control
        return self

    def seed(self, seed: int) -> "ScenarioBuilder":
        self._seed = seed
        return self

    # Build

    def build(self) -> Scenario:
        """Validate the collected settings and return the Scenario."""
        errors = self._validate_configuration()
        if errors:
            raise ValidationError(f"Scenario validation failed: {errors}")

        objective = None
        if self._objective:
            objective = ObjectiveConfig(**self._objective)
        return Scenario(
            name=self._name,
            alpha=self._alpha,
            epsilon=self._epsilon,
            y0=self._y0,
            n=self._dimension(),
            kappa=self._kappa,
            grid=TimeGrid(T=self._T, N=self._N),
            control=self._control,
            objective=objective,
            optimizer=OptimizerConfig(**self._optimizer),
            seed=self._seed,
            base_dir=self._base_dir,
        )

    def _dimension(self) -> int:
        if self._y0 is not None:
            return len(self._y0)
        if self._objective.get("q_d") is not None:
            return len(self._objective["q_d"])
        return self._control.dimension() or 1

    def _validate_configuration(self) -> List[str]:
        """Collect configuration errors."""
        errors = []

        if self._alpha is None:
            errors.append("alpha is required")
        elif self._alpha <= 0:
            errors.append(f"alpha must be positive, got {self._alpha}")

        if self._epsilon is not None and self._epsilon < 0:
            errors.append(f"viscosity cannot be negative, got {self._epsilon}")

        if self._T is None or self._N is None:
            errors.append("horizon(T, N) is required")
        else:
            if self._T <= 0:
                errors.append(f"horizon T must be positive, got {self._T}")
            if self._N < 2:
                errors.append(f"grid needs N >= 2 intervals, got {self._N}")

        n = self._dimension()
        dims = {
            "control": self._control.dimension(),
            "target": len(self._objective["q_d"]) if "q_d" in self._objective else None,
            "linear weights": len(self._objective["linear_weights"]) if "linear_weights" in self._objective else None,
        }
        for name, dim in dims.items():
            if dim is not None and dim != n:
                errors.append(f"{name} has dimension {dim}, expected {n}")

        if self._objective and "q_d" not in self._objective:
            errors.append("objective settings need a target q_d")

        eps_list = self._optimizer.get("eps_list")
        if eps_list is not None and (any(e <= 0 for e in eps_list)
                                     or any(a <= b for a, b in zip(eps_list, eps_list[1:]))):
            errors.append("eps_list must be positive and strictly decreasing")

        return errors
