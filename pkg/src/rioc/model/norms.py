"""
Discrete norms and the H^1_0 Riesz map.

The H^1 inner product is u^T (M + K) v with the lumped trapezoid mass matrix M
and the forward-difference stiffness matrix K. Both are tridiagonal, so the
Riesz map on zero-initial trajectories is a banded solve.
"""

import numpy as np
from scipy.linalg import solve_banded

from .grid import TimeGrid, Trajectory, require_same_grid


def h1_inner(u: Trajectory, v: Trajectory) -> float:
    """Composite trapezoid of <u,v> plus <u',v'> with forward-difference derivatives."""
    grid = require_same_grid(u, v)
    dt = grid.dt
    uv = np.sum(u.values * v.values, axis=1)
    mass = 0.5 * dt * float(np.sum(uv[:-1] + uv[1:]))
    du = np.diff(u.values, axis=0)
    dv = np.diff(v.values, axis=0)
    stiffness = float(np.sum(du * dv)) / dt
    return mass + stiffness


def h1_norm(v: Trajectory) -> float:
    return float(np.sqrt(max(h1_inner(v, v), 0.0)))


def w11_norm(v: Trajectory) -> float:
    """L^1 norm of v (trapezoid of the Euclidean norm) plus L^1 norm of its forward differences."""
    dt = v.grid.dt
    mag = np.linalg.norm(v.values, axis=1)
    l1 = 0.5 * dt * float(np.sum(mag[:-1] + mag[1:]))
    deriv = float(np.sum(np.linalg.norm(np.diff(v.values, axis=0), axis=1)))
    return l1 + deriv


def sup_norm(v: Trajectory) -> float:
    return float(np.max(np.abs(v.values))) if v.values.size else 0.0


def l2_norm(v: Trajectory) -> float:
    """L^2 norm; rectangle rule for interval samples, trapezoid for node samples."""
    dt = v.grid.dt
    sq = np.sum(v.values * v.values, axis=1)
    if v.per_interval:
        return float(np.sqrt(dt * np.sum(sq)))
    return float(np.sqrt(0.5 * dt * np.sum(sq[:-1] + sq[1:])))


def backward_integral(lam: Trajectory) -> Trajectory:
    """
    Lambda(t_k) = integral of lam over [t_k, T] at every node.

    Interval samples integrate exactly (piecewise constant); node samples use
    the backward trapezoid.
    """
    dt = lam.grid.dt
    vals = lam.values
    pieces = dt * vals if lam.per_interval else 0.5 * dt * (vals[:-1] + vals[1:])
    out = np.zeros((lam.grid.N + 1, lam.n))
    out[:-1] = np.cumsum(pieces[::-1], axis=0)[::-1]
    return Trajectory(grid=lam.grid, values=out)


def dual_w1inf_proxy(lam: Trajectory) -> float:
    """max_k |Lambda(t_k)|_inf, a computable stand-in for the W^{-1,inf} norm of lam."""
    return sup_norm(backward_integral(lam))


# H^1_0 Riesz map

def h1_bands(grid: TimeGrid) -> np.ndarray:
    """Full (N+1)x(N+1) matrix M + K in ``solve_banded`` (1, 1) layout."""
    N, dt = grid.N, grid.dt
    diag = np.full(N + 1, dt + 2.0 / dt)
    diag[0] = diag[-1] = 0.5 * dt + 1.0 / dt
    off = np.full(N + 1, -1.0 / dt)
    ab = np.zeros((3, N + 1))
    ab[0, 1:] = off[1:]
    ab[1] = diag
    ab[2, :-1] = off[:-1]
    return ab


def h1_apply(grid: TimeGrid, values: np.ndarray) -> np.ndarray:
    """Multiply node values (N+1, n) by M + K."""
    ab = h1_bands(grid)
    out = ab[1][:, None] * values
    out[:-1] += ab[0, 1:][:, None] * values[1:]
    out[1:] += ab[2, :-1][:, None] * values[:-1]
    return out


def riesz_solve(grid: TimeGrid, rhs_free: np.ndarray) -> np.ndarray:
    """
    Solve (M + K) g = rhs on nodes 1..N with g_0 = 0.

    ``rhs_free`` has shape (N, n); the returned node array has shape (N+1, n).
    """
    ab = h1_bands(grid)[:, 1:]
    ab[0, 0] = 0.0
    out = np.zeros((grid.N + 1, rhs_free.shape[1]))
    out[1:] = solve_banded((1, 1), ab, rhs_free)
    return out


def h1_dual_norm(grid: TimeGrid, functional_free: np.ndarray) -> float:
    """H^1_0 dual norm sqrt(F^T R^{-1} F) of a functional given by its values on hats 1..N."""
    g = riesz_solve(grid, functional_free)
    return float(np.sqrt(max(float(np.sum(functional_free * g[1:])), 0.0)))
