"""
Flat-file output: CSV trajectories and sweep tables, JSON reports.

Floats are written with ``repr`` so a re-read value equals the written one.
CSV column order is fixed: t, q_1..q_n, z_1..z_n, H_1..H_n, then the optional
groups xi, lam, ell and energy_residual. Per-interval multipliers lam_k are
written on node k+1; node 0 carries 0.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from .model.grid import TimeGrid, Trajectory

PathLike = Union[str, Path]

STATE_GROUPS = ("q", "z", "H")
OPTIONAL_GROUPS = ("xi", "lam", "ell")


def _fmt(x: float) -> str:
    return repr(float(x))


def group_columns(name: str, n: int) -> List[str]:
    return [f"{name}_{i + 1}" for i in range(n)]


def grid_from_times(t: np.ndarray) -> TimeGrid:
    """Uniform grid whose nodes are ``t``."""
    if t.ndim != 1 or t.shape[0] < 3 or t[0] != 0.0:
        raise ValueError("time column must start at 0 and have at least 3 nodes")
    grid = TimeGrid(T=float(t[-1]), N=t.shape[0] - 1)
    if not np.allclose(grid.nodes, t, rtol=0.0, atol=1e-12 * max(1.0, grid.T)):
        raise ValueError("time column is not a uniform grid")
    return grid


def interval_to_nodes(tr: Trajectory) -> np.ndarray:
    """Interval samples placed on the right node of their interval; node 0 is 0."""
    out = np.zeros((tr.grid.N + 1, tr.n))
    out[1:] = tr.values
    return out


def write_table_csv(path: PathLike, header: Sequence[str], rows: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def read_table_csv(path: PathLike) -> Tuple[List[str], np.ndarray]:
    """Header and float data of a CSV file."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty")
        data = [[float(x) for x in row] for row in reader if row]
    if not data:
        raise ValueError(f"{path} has no data rows")
    return header, np.asarray(data, dtype=float)


def write_trajectory_csv(path: PathLike, tr: Trajectory, name: str = "v") -> None:
    """Single node trajectory with columns t, name_1..name_n."""
    values = interval_to_nodes(tr) if tr.per_interval else tr.values
    write_table_csv(path, ["t"] + group_columns(name, tr.n), np.column_stack([tr.grid.nodes, values]))


def read_trajectory_csv(path: PathLike, name: str = "v", zero_initial: bool = False) -> Trajectory:
    header, data = read_table_csv(path)
    cols = _group_indices(header, name)
    return Trajectory(grid=grid_from_times(data[:, 0]), values=data[:, cols], zero_initial=zero_initial)


def _group_indices(header: Sequence[str], name: str) -> List[int]:
    prefix = f"{name}_"
    cols = [i for i, col in enumerate(header) if col.startswith(prefix) and col[len(prefix):].isdigit()]
    if not cols:
        raise ValueError(f"no '{name}_*' columns in header {list(header)}")
    return cols


def write_solution_csv(path: PathLike, q: Trajectory, z: Trajectory, H: Trajectory,
                       xi: Optional[Trajectory] = None, lam: Optional[Trajectory] = None,
                       ell: Optional[Trajectory] = None,
                       energy_residual: Optional[np.ndarray] = None) -> None:
    n = q.n
    header = ["t"] + [c for g in STATE_GROUPS for c in group_columns(g, n)]
    blocks = [q.grid.nodes[:, None], q.values, z.values, H.values]
    for name, tr in (("xi", xi), ("lam", lam), ("ell", ell)):
        if tr is None:
            continue
        header += group_columns(name, n)
        blocks.append(interval_to_nodes(tr) if tr.per_interval else tr.values)
    if energy_residual is not None:
        header.append("energy_residual")
        blocks.append(np.asarray(energy_residual, dtype=float)[:, None])
    write_table_csv(path, header, np.hstack(blocks))


class SolutionTable(BaseModel):
    """Columns of a solution CSV, grouped by name."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: TimeGrid
    groups: Dict[str, np.ndarray]

    def trajectory(self, name: str, zero_initial: bool = False) -> Trajectory:
        if name not in self.groups:
            raise KeyError(f"column group '{name}' not present")
        return Trajectory(grid=self.grid, values=self.groups[name], zero_initial=zero_initial)

    def multiplier(self) -> Trajectory:
        """lam columns back to one sample per interval."""
        return Trajectory(grid=self.grid, values=self.groups["lam"][1:], per_interval=True)


def read_solution_csv(path: PathLike) -> SolutionTable:
    header, data = read_table_csv(path)
    if header[0] != "t":
        raise ValueError(f"{path}: first column must be 't'")
    groups = {}
    for name in STATE_GROUPS + OPTIONAL_GROUPS:
        try:
            groups[name] = data[:, _group_indices(header, name)]
        except ValueError:
            continue
    return SolutionTable(grid=grid_from_times(data[:, 0]), groups=groups)


def write_sweep_csv(path: PathLike, rows: Sequence[Any]) -> None:
    header = ["epsilon", "objective_init", "objective", "ell_distance_h1", "q_distance_c0",
              "xi_sup", "lambda_dual_proxy", "lambda_l2", "adjoint_residual",
              "sign_violation", "gradient_residual", "complementarity_xi", "iterations"]
    table = [
        [r.epsilon, r.objective_init, r.objective, r.ell_distance_h1, r.q_distance_c0, r.xi_sup,
         r.lambda_dual_proxy, r.lambda_l2, r.stationarity.adjoint_residual,
         r.stationarity.sign_violation, r.stationarity.gradient_residual,
         r.stationarity.complementarity_xi, r.iterations]
        for r in rows
    ]
    write_table_csv(path, header, np.asarray(table, dtype=float))


def dumps_json(payload: Union[BaseModel, Dict[str, Any], List[Any]]) -> str:
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json")
    elif isinstance(payload, list):
        payload = [p.model_dump(mode="json") if isinstance(p, BaseModel) else p for p in payload]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_json(path: PathLike, payload: Union[BaseModel, Dict[str, Any], List[Any]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(payload), encoding="utf-8")
