"""
Scenario configuration.

A scenario is one JSON document describing the model, the grid, the control,
the objective and the optimizer settings of a run:

    {
      "name": "play",
      "alpha": 2.0,
      "y0": [0.0],
      "kappa": {"kind": "constant", "value": 0.5},
      "grid": {"T": 2.0, "N": 2000},
      "control": {"kind": "ramp", "slope": [1.0]},
      "objective": {"j_kind": "zero", "q_d": [0.5]}
    }

File references (``control.path``) are resolved relative to the scenario file.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from typing_extensions import Self

from .errors import ValidationError
from .export import read_table_csv
from .model.base import StrEnum
from .model.degradation import ConstantDegradation, DegradationFunction
from .model.grid import TimeGrid, Trajectory
from .model.params import JKind, ModelParams, ObjectiveSpec
from .optimizer import DEFAULT_EPS_LIST, OptimizeOptions


class ControlKind(StrEnum):
    """How a control (or target) trajectory is specified."""
    ZERO = "zero"
    CONSTANT = "constant"
    RAMP = "ramp"
    TABLE = "table"
    FILE = "file"


class ControlSpec(BaseModel):
    """
    Recipe for a node trajectory.

    - zero: identically 0
    - constant: ``value`` at every node
    - ramp: ``slope`` * t
    - table: rows [t, v_1, ..., v_n], interpolated piecewise linearly
    - file: CSV at ``path`` with a ``t`` column followed by n value columns
    """

    kind: ControlKind = Field(default=ControlKind.ZERO, description="Kind of control recipe")
    value: Optional[List[float]] = Field(default=None, description="Constant value (kind=constant)")
    slope: Optional[List[float]] = Field(default=None, description="Ramp slope (kind=ramp)")
    table: Optional[List[List[float]]] = Field(default=None, description="Rows [t, v_1..v_n] (kind=table)")
    path: Optional[str] = Field(default=None, description="CSV file (kind=file)")

    @field_validator("kind", mode="before")
    @classmethod
    def validate_kind(cls, v: Union[ControlKind, str]) -> ControlKind:
        if isinstance(v, str):
            try:
                return ControlKind(v)
            except ValueError:
                raise ValueError(f"Invalid control kind: {v}")
        return v

    @model_validator(mode="after")
    def validate_kind_requirements(self) -> Self:
        required = {
            ControlKind.CONSTANT: "value",
            ControlKind.RAMP: "slope",
            ControlKind.TABLE: "table",
            ControlKind.FILE: "path",
        }
        name = required.get(self.kind)
        if name is not None and getattr(self, name) is None:
            raise ValueError(f"control kind '{self.kind}' requires '{name}'")
        if self.kind == ControlKind.TABLE:
            widths = {len(row) for row in self.table}
            if len(widths) != 1 or widths.pop() < 2:
                raise ValueError("table rows must all have the form [t, v_1, ..., v_n]")
        return self

    def dimension(self) -> Optional[int]:
        """Dimension implied by the recipe, if any."""
        if self.kind == ControlKind.CONSTANT:
            return len(self.value)
        if self.kind == ControlKind.RAMP:
            return len(self.slope)
        if self.kind == ControlKind.TABLE:
            return len(self.table[0]) - 1
        return None

    def resolve_path(self, base_dir: Optional[Path]) -> Path:
        path = Path(self.path)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        return path

    def realize(self, grid: TimeGrid, n: int, base_dir: Optional[Path] = None) -> Trajectory:
        """Sample the recipe on ``grid``; the result is zero_initial when it vanishes at t=0."""
        if self.kind == ControlKind.ZERO:
            return Trajectory.zeros(grid, n)
        if self.kind == ControlKind.CONSTANT:
            tr = Trajectory.constant(grid, np.asarray(self.value))
        elif self.kind == ControlKind.RAMP:
            return Trajectory.ramp(grid, np.asarray(self.slope))
        elif self.kind == ControlKind.TABLE:
            table = np.asarray(self.table, dtype=float)
            tr = Trajectory.from_table(grid, table[:, 0], table[:, 1:])
        else:
            _, data = read_table_csv(self.resolve_path(base_dir))
            tr = Trajectory.from_table(grid, data[:, 0], data[:, 1:n + 1])
        if tr.n != n:
            raise ValueError(f"control has dimension {tr.n}, expected {n}")
        if np.all(tr.values[0] == 0.0):
            return Trajectory(grid=grid, values=tr.values, zero_initial=True)
        return tr


class ObjectiveConfig(BaseModel):
    """Objective section of a scenario."""

    j_kind: JKind = Field(default=JKind.ZERO, description="Running cost kind")
    q_d: List[float] = Field(..., description="Terminal target")
    tracking_target: Optional[ControlSpec] = Field(default=None, description="Target trajectory of the tracking cost")
    tracking_weight: float = Field(default=1.0, ge=0)
    linear_weights: Optional[List[float]] = Field(default=None)
    include_proximal: bool = Field(default=False)
    anchor: Optional[ControlSpec] = Field(default=None, description="Proximal anchor")

    def build(self, grid: TimeGrid, n: int, base_dir: Optional[Path] = None) -> ObjectiveSpec:
        target = self.tracking_target.realize(grid, n, base_dir) if self.tracking_target else None
        anchor = self.anchor.realize(grid, n, base_dir) if self.anchor else None
        return ObjectiveSpec(
            j_kind=self.j_kind,
            q_d=self.q_d,
            tracking_target=target,
            tracking_weight=self.tracking_weight,
            linear_weights=self.linear_weights,
            proximal_anchor=anchor,
            include_proximal=self.include_proximal,
        )


class OptimizerConfig(BaseModel):
    """Optimizer section of a scenario."""

    max_iters: int = Field(default=200, ge=0)
    c1: float = Field(default=1e-4, gt=0, lt=1)
    backtrack: float = Field(default=0.5, gt=0, lt=1)
    initial_step: float = Field(default=1.0, gt=0)
    max_halvings: int = Field(default=60, ge=1)
    grad_tol: float = Field(default=1e-6, gt=0)
    eps_list: List[float] = Field(default_factory=lambda: list(DEFAULT_EPS_LIST))
    warm_start: bool = Field(default=True, description="Sequential warm-started sweep")
    initial_control: Optional[ControlSpec] = Field(default=None, description="Start of the descent (default: zero)")

    @field_validator("eps_list")
    @classmethod
    def validate_eps_list(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("eps_list must not be empty")
        if any(e <= 0 for e in v) or any(a <= b for a, b in zip(v, v[1:])):
            raise ValueError("eps_list must be positive and strictly decreasing")
        return v

    def options(self, epsilon: Optional[float] = None) -> OptimizeOptions:
        return OptimizeOptions(
            max_iters=self.max_iters, c1=self.c1, backtrack=self.backtrack,
            initial_step=self.initial_step, max_halvings=self.max_halvings,
            grad_tol=self.grad_tol, epsilon=epsilon,
        )


class Scenario(BaseModel):
    """Complete description of one run."""

    name: str = Field(default="scenario")
    alpha: float = Field(..., gt=0, description="Energy curvature")
    epsilon: Optional[float] = Field(default=None, ge=0, description="Viscosity; absent or 0 = rate-independent")
    n: Optional[int] = Field(default=None, ge=1, description="Dimension; inferred from y0 when absent")
    y0: Optional[List[float]] = Field(default=None, description="History seed (default zeros)")
    kappa: DegradationFunction = Field(default_factory=lambda: ConstantDegradation(value=0.0))
    grid: TimeGrid
    control: ControlSpec = Field(default_factory=ControlSpec)
    objective: Optional[ObjectiveConfig] = Field(default=None)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    seed: int = Field(default=0, ge=0, description="Seed for randomized directions")
    base_dir: Optional[Path] = Field(default=None, exclude=True)

    @field_validator("kappa", mode="before")
    @classmethod
    def coerce_kappa(cls, v: Any) -> DegradationFunction:
        if isinstance(v, dict):
            return DegradationFunction.from_dict(v)
        return v

    @model_validator(mode="after")
    def validate_dimensions(self) -> Self:
        if self.y0 is None:
            self.y0 = [0.0] * (self.n or 1)
        if self.n is None:
            self.n = len(self.y0)
        if len(self.y0) != self.n:
            raise ValueError(f"y0 has {len(self.y0)} entries but n={self.n}")
        specs = [("control", self.control)]
        if self.objective is not None:
            if len(self.objective.q_d) != self.n:
                raise ValueError(f"q_d has {len(self.objective.q_d)} entries but n={self.n}")
            if self.objective.linear_weights is not None and len(self.objective.linear_weights) != self.n:
                raise ValueError("linear_weights dimension does not match n")
            specs += [("tracking_target", self.objective.tracking_target), ("anchor", self.objective.anchor)]
        specs.append(("initial_control", self.optimizer.initial_control))
        for name, spec in specs:
            if spec is None:
                continue
            dim = spec.dimension()
            if dim is not None and dim != self.n:
                raise ValueError(f"{name} has dimension {dim} but n={self.n}")
            if spec.kind == ControlKind.FILE and not spec.resolve_path(self.base_dir).is_file():
                raise ValueError(f"{name} file not found: {spec.resolve_path(self.base_dir)}")
        return self

    # Derived objects

    def to_params(self, epsilon: Optional[float] = None) -> ModelParams:
        eps = self.epsilon if epsilon is None else epsilon
        return ModelParams(alpha=self.alpha, epsilon=eps or 0.0, y0=self.y0, kappa=self.kappa)

    def control_trajectory(self) -> Trajectory:
        return self.control.realize(self.grid, self.n, self.base_dir)

    def initial_control(self) -> Trajectory:
        spec = self.optimizer.initial_control or ControlSpec()
        return spec.realize(self.grid, self.n, self.base_dir)

    def to_objective(self) -> ObjectiveSpec:
        config = self.objective or ObjectiveConfig(q_d=[0.0] * self.n)
        return config.build(self.grid, self.n, self.base_dir)

    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode="json", exclude_none=True)
        data["kappa"] = self.kappa.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> "Scenario":
        """Build from parsed data; ``base_dir`` comes from the caller only, never from the data."""
        if "base_dir" in data:
            raise ValidationError("scenario data must not set base_dir; it is taken from the file location")
        return cls(**data, base_dir=base_dir)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, base_dir: Optional[Path] = None) -> "Scenario":
        return cls.from_dict(json.loads(text), base_dir=base_dir)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Scenario":
        """Read and validate a scenario file."""
        path = Path(path)
        return cls.from_json(path.read_text(encoding="utf-8"), base_dir=path.parent)
