"""
Time grids and grid-sampled trajectories.

Every state, control, adjoint and multiplier in rioc lives on a uniform
partition of [0, T]. Node-based trajectories carry N+1 samples; interval-based
ones (rates, multipliers) carry N samples, sample k standing for (t_k, t_{k+1}).
"""

from typing import Any, Callable, Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator
from typing_extensions import Self

from .base import ARRAY_MODEL_CONFIG


class TimeGrid(BaseModel):
    """Uniform partition of [0, T] into N intervals."""

    model_config = ConfigDict(frozen=True)

    T: float = Field(..., gt=0, description="Final time")
    N: int = Field(..., ge=2, description="Number of intervals")

    @computed_field
    @property
    def dt(self) -> float:
        return self.T / self.N

    @property
    def nodes(self) -> np.ndarray:
        """Node times t_0..t_N; linspace pins t_N = T exactly."""
        return np.linspace(0.0, self.T, self.N + 1)

    def to_dict(self) -> Dict[str, Any]:
        return {"T": self.T, "N": self.N}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TimeGrid":
        return cls(T=float(data["T"]), N=int(data["N"]))


class Trajectory(BaseModel):
    """
    Grid samples of an R^n-valued function.

    ``values`` always has shape (rows, n): rows = N+1 for node samples and
    rows = N when ``per_interval`` is set. A ``zero_initial`` trajectory has
    values[0] = 0 (membership in H^1_0 / W^{1,1}_0).
    """

    model_config = ARRAY_MODEL_CONFIG

    grid: TimeGrid
    values: np.ndarray
    zero_initial: bool = Field(default=False, description="values[0] == 0 is enforced")
    per_interval: bool = Field(default=False, description="One sample per interval instead of per node")

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=float, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ValueError(f"values must be 1-D or 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def validate_shape(self) -> Self:
        rows = self.grid.N if self.per_interval else self.grid.N + 1
        if self.values.shape[0] != rows:
            raise ValueError(
                f"expected {rows} samples for N={self.grid.N}, got {self.values.shape[0]}"
            )
        if self.values.shape[1] < 1:
            raise ValueError("trajectory must have at least one component")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trajectory contains non-finite samples")
        if self.zero_initial and np.any(self.values[0] != 0.0):
            raise ValueError("zero_initial trajectory must vanish at t=0")
        return self

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        """Sample times: nodes, or right interval endpoints for per-interval data."""
        nodes = self.grid.nodes
        return nodes[1:] if self.per_interval else nodes

    def __len__(self) -> int:
        return self.values.shape[0]

    def _like(self, values: np.ndarray, zero_initial: bool) -> "Trajectory":
        return Trajectory(grid=self.grid, values=values, zero_initial=zero_initial,
                          per_interval=self.per_interval)

    def _other_values(self, other: Union["Trajectory", float]) -> np.ndarray:
        if isinstance(other, Trajectory):
            if other.grid != self.grid or other.per_interval != self.per_interval:
                raise ValueError("trajectories live on different grids")
            return other.values
        return np.asarray(other, dtype=float)

    def __add__(self, other: Union["Trajectory", float]) -> "Trajectory":
        zero = self.zero_initial and isinstance(other, Trajectory) and other.zero_initial
        return self._like(self.values + self._other_values(other), zero)

    def __sub__(self, other: Union["Trajectory", float]) -> "Trajectory":
        zero = self.zero_initial and isinstance(other, Trajectory) and other.zero_initial
        return self._like(self.values - self._other_values(other), zero)

    def __mul__(self, scalar: float) -> "Trajectory":
        return self._like(self.values * float(scalar), self.zero_initial)

    __rmul__ = __mul__

    def __neg__(self) -> "Trajectory":
        return self * -1.0

    # Factories

    @classmethod
    def zeros(cls, grid: TimeGrid, n: int, per_interval: bool = False) -> "Trajectory":
        rows = grid.N if per_interval else grid.N + 1
        return cls(grid=grid, values=np.zeros((rows, n)), zero_initial=not per_interval,
                   per_interval=per_interval)

    @classmethod
    def constant(cls, grid: TimeGrid, value: Union[float, np.ndarray]) -> "Trajectory":
        vec = np.atleast_1d(np.asarray(value, dtype=float))
        return cls(grid=grid, values=np.tile(vec, (grid.N + 1, 1)))

    @classmethod
    def ramp(cls, grid: TimeGrid, slope: Union[float, np.ndarray]) -> "Trajectory":
        """Linear trajectory t -> slope * t (vanishes at t=0)."""
        vec = np.atleast_1d(np.asarray(slope, dtype=float))
        return cls(grid=grid, values=np.outer(grid.nodes, vec), zero_initial=True)

    @classmethod
    def from_function(cls, grid: TimeGrid, func: Callable[[np.ndarray], np.ndarray],
                      zero_initial: bool = False) -> "Trajectory":
        """Sample ``func`` on the nodes; ``func`` receives the node array."""
        values = np.asarray(func(grid.nodes), dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if zero_initial:
            values = values.copy()
            values[0] = 0.0
        return cls(grid=grid, values=values, zero_initial=zero_initial)

    @classmethod
    def from_table(cls, grid: TimeGrid, times: np.ndarray, table: np.ndarray,
                   zero_initial: bool = False) -> "Trajectory":
        """Piecewise-linear interpolation of a (time, value) table onto the nodes."""
        times = np.asarray(times, dtype=float)
        table = np.asarray(table, dtype=float)
        if table.ndim == 1:
            table = table.reshape(-1, 1)
        if times.ndim != 1 or times.shape[0] != table.shape[0]:
            raise ValueError("table times and values have mismatched lengths")
        if np.any(np.diff(times) <= 0):
            raise ValueError("table times must be strictly increasing")
        nodes = grid.nodes
        values = np.column_stack([np.interp(nodes, times, table[:, i]) for i in range(table.shape[1])])
        return cls(grid=grid, values=values, zero_initial=zero_initial)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "grid": self.grid.to_dict(),
            "values": self.values.tolist(),
            "zero_initial": self.zero_initial,
            "per_interval": self.per_interval,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Trajectory":
        return cls(
            grid=TimeGrid.from_dict(data["grid"]),
            values=data["values"],
            zero_initial=bool(data.get("zero_initial", False)),
            per_interval=bool(data.get("per_interval", False)),
        )


def require_same_grid(*trajectories: Optional[Trajectory]) -> TimeGrid:
    """Return the shared grid of ``trajectories`` or raise ValueError."""
    grids = [tr.grid for tr in trajectories if tr is not None]
    if not grids:
        raise ValueError("no trajectories given")
    for grid in grids[1:]:
        if grid != grids[0]:
            raise ValueError(f"grid mismatch: {grid} vs {grids[0]}")
    return grids[0]
