"""
History operator, stored energy and driving force.
"""

import numpy as np

from .grid import Trajectory, require_same_grid
from .params import ModelParams


def _check_dim(tr: Trajectory, n: int, name: str) -> None:
    if tr.n != n:
        raise ValueError(f"{name} has dimension {tr.n}, expected {n}")


def history_values(q: np.ndarray, y0: np.ndarray, dt: float) -> np.ndarray:
    """Trapezoidal running integral of node values ``q`` plus ``y0``."""
    steps = np.empty_like(q)
    steps[0] = y0
    steps[1:] = 0.5 * dt * (q[:-1] + q[1:])
    # sequential accumulation, same rounding as the forward march
    return np.cumsum(steps, axis=0)


def history(q: Trajectory, y0: np.ndarray) -> Trajectory:
    """H(q)(t_k) = y0 + trapezoid of the integral of q over [0, t_k]."""
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    _check_dim(q, y0.shape[0], "q")
    if q.per_interval:
        raise ValueError("history expects node samples")
    return Trajectory(grid=q.grid, values=history_values(q.values, y0, q.grid.dt))


def stored_energy(t_k: int, q_k: np.ndarray, ell_k: np.ndarray, params: ModelParams) -> float:
    """(alpha/2)|q_k|^2 - <ell_k, q_k>; ``t_k`` is the node index (the energy is time-explicit only through ell)."""
    q_k = np.atleast_1d(np.asarray(q_k, dtype=float))
    ell_k = np.atleast_1d(np.asarray(ell_k, dtype=float))
    if q_k.shape != ell_k.shape or q_k.shape[0] != params.n:
        raise ValueError(f"dimension mismatch at node {t_k}: q {q_k.shape}, ell {ell_k.shape}, n={params.n}")
    return 0.5 * params.alpha * float(q_k @ q_k) - float(ell_k @ q_k)


def z_field(q: Trajectory, ell: Trajectory, params: ModelParams) -> Trajectory:
    """Driving force z = -alpha q + ell - kappa(H(q)) at every node."""
    require_same_grid(q, ell)
    _check_dim(q, params.n, "q")
    _check_dim(ell, params.n, "ell")
    H = history_values(q.values, params.y0, q.grid.dt)
    z = -params.alpha * q.values + ell.values - params.kappa.eval(H)
    return Trajectory(grid=q.grid, values=z)


def step_drive_values(q: np.ndarray, ell: np.ndarray, H: np.ndarray, alpha: float, kappa) -> np.ndarray:
    """
    Lagged driving force of each time step, one row per interval:
    -alpha q_{k+1} + ell_{k+1} - kappa(H_k). Its sign decides whether step k is active.
    """
    return -alpha * q[1:] + ell[1:] - kappa.eval(H[:-1])
