"""
Adjoint state, multiplier and reduced gradient for the viscous control problem.

The backward recursion mirrors the forward step. With eps_h = eps + alpha dt
(the viscosity seen by the implicit step), a_k = 1 on positive steps and 0
otherwise:

    xi_N   = q_N - q_d
    lam_k  = a_k xi_{k+1} / eps_h
    B_k    = B_{k+1} + dt kappa'(H_k) lam_k            (B_N = 0)
    xi_k   = xi_{k+1} + dt j'(q_k) - alpha dt lam_k - dt (B_k + B_{k+1}) / 2

B is the backward integral of kappa'(H) lam, i.e. the adjoint of the
linearized history term (kappa o H)'(q) after Fubini. The derivative of the
state part of the objective in direction v is sum_k dt lam_k v_{k+1}.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from .errors import ValidationError
from .forward import ForwardSolution, solve_viscous
from .model.base import ARRAY_MODEL_CONFIG
from .model.grid import TimeGrid, Trajectory
from .model.norms import backward_integral, h1_apply, h1_inner, riesz_solve
from .model.params import ModelParams, ObjectiveSpec
from .sensitivity import ActivationLabel, classify_z, default_tol_z

logger = logging.getLogger(__name__)

# Sign of the multiplier pairing in the gradient functional.
GRADIENT_SIGN = 1.0


class AdjointSolution(BaseModel):
    """Adjoint state xi (nodes), multiplier lam (intervals) and Lam = int_t^T lam."""

    model_config = ARRAY_MODEL_CONFIG

    xi: Trajectory
    lam: Trajectory
    Lam: Trajectory
    activation_pattern: np.ndarray
    effective_viscosity: float = Field(..., gt=0, description="eps + alpha dt")


def solve_adjoint(params: ModelParams, ell: Trajectory, q: ForwardSolution, obj: ObjectiveSpec,
                  tol_z: Optional[float] = None) -> AdjointSolution:
    """Backward integration of -xi' + alpha lam + [(kappa o H)'(q)]^* lam = j'(q), xi(T) = q(T) - q_d."""
    if params.epsilon <= 0:
        raise ValidationError(f"adjoint needs epsilon > 0, got {params.epsilon}")
    grid = q.grid
    if ell.grid != grid:
        raise ValidationError("control and forward solution live on different grids")
    if obj.n != params.n:
        raise ValidationError(f"objective has dimension {obj.n}, model has n={params.n}")
    tol_z = default_tol_z(ell) if tol_z is None else tol_z
    pattern = classify_z(q.step_drive, tol_z)
    if pattern.shape != (grid.N, params.n):
        raise ValidationError("activation pattern does not cover every step")

    N, dt = grid.N, grid.dt
    alpha = params.alpha
    eps_h = params.epsilon + alpha * dt
    active = (pattern == ActivationLabel.POSITIVE).astype(float)
    dkappa = params.kappa.deriv(q.H.values)
    jp = obj.j_prime(q.q.values)

    xi = np.zeros((N + 1, params.n))
    lam = np.zeros((N, params.n))
    B = np.zeros((N + 1, params.n))
    xi[N] = q.q.values[N] - obj.q_d
    for k in range(N - 1, -1, -1):
        lam[k] = active[k] * xi[k + 1] / eps_h
        B[k] = B[k + 1] + dt * dkappa[k] * lam[k]
        xi[k] = xi[k + 1] + dt * jp[k] - alpha * dt * lam[k] - 0.5 * dt * (B[k] + B[k + 1])

    lam_tr = Trajectory(grid=grid, values=lam, per_interval=True)
    return AdjointSolution(
        xi=Trajectory(grid=grid, values=xi),
        lam=lam_tr,
        Lam=backward_integral(lam_tr),
        activation_pattern=pattern,
        effective_viscosity=eps_h,
    )


def gradient_functional(ell: Trajectory, lam: Trajectory, obj: ObjectiveSpec,
                        include_proximal: Optional[bool] = None) -> np.ndarray:
    """
    Values of v -> sign*<lam, v> + (ell, v)_H1 [+ (ell - anchor, v)_H1] on the hats of nodes 1..N.

    Shape (N, n).
    """
    grid = ell.grid
    use_prox = obj.include_proximal if include_proximal is None else include_proximal
    base = ell.values
    if use_prox:
        base = base + (ell.values - obj.proximal_anchor.values)
    rhs = h1_apply(grid, base)[1:]
    return rhs + GRADIENT_SIGN * grid.dt * lam.values


def reduced_gradient(ell: Trajectory, adj: AdjointSolution, obj: ObjectiveSpec,
                     grid: TimeGrid) -> Trajectory:
    """H^1_0 Riesz representative g of the derivative of the reduced objective."""
    if ell.grid != grid or adj.lam.grid != grid:
        raise ValidationError("gradient inputs live on different grids")
    g = riesz_solve(grid, gradient_functional(ell, adj.lam, obj))
    return Trajectory(grid=grid, values=g, zero_initial=True)


def h1_gradient_norm(g: Trajectory) -> float:
    return float(np.sqrt(max(h1_inner(g, g), 0.0)))


# Gradient verification

class GradientCheckRow(BaseModel):
    """Central finite difference slope against the adjoint slope for one direction."""

    direction: int
    fd_slope: float
    adjoint_slope: float
    rel_error: float
    nonsmooth: bool


def random_direction(grid: TimeGrid, n: int, rng: np.random.Generator, modes: int = 4) -> Trajectory:
    """Smooth random H^1_0 direction: sum_j a_j sin((j - 1/2) pi t / T) / j."""
    t = grid.nodes / grid.T
    coeffs = rng.standard_normal((modes, n))
    values = np.zeros((grid.N + 1, n))
    for j in range(1, modes + 1):
        values += np.outer(np.sin((j - 0.5) * np.pi * t), coeffs[j - 1] / j)
    values[0] = 0.0
    return Trajectory(grid=grid, values=values, zero_initial=True)


def _objective(params: ModelParams, ell: Trajectory, obj: ObjectiveSpec) -> float:
    return obj.evaluate(solve_viscous(params, ell, ell.grid).q, ell)


def gradient_check(params: ModelParams, ell: Trajectory, obj: ObjectiveSpec,
                   directions: Sequence[Trajectory], tau: float = 1e-5,
                   tol_z: Optional[float] = None) -> List[GradientCheckRow]:
    """Compare (J(ell + tau v) - J(ell - tau v)) / (2 tau) with (g, v)_H1 for every direction."""
    grid = ell.grid
    sol = solve_viscous(params, ell, grid)
    adj = solve_adjoint(params, ell, sol, obj, tol_z)
    g = reduced_gradient(ell, adj, obj, grid)
    tol_z = default_tol_z(ell) if tol_z is None else tol_z
    base_pattern = adj.activation_pattern
    rows = []
    for i, v in enumerate(directions):
        plus, minus = ell + tau * v, ell - tau * v
        fd = (_objective(params, plus, obj) - _objective(params, minus, obj)) / (2.0 * tau)
        slope = h1_inner(g, v)
        flipped = any(
            np.any(classify_z(solve_viscous(params, shifted, grid).step_drive, tol_z) != base_pattern)
            for shifted in (plus, minus)
        )
        nonsmooth = bool(np.any(base_pattern == ActivationLabel.ZERO) or flipped)
        rel = abs(fd - slope) / max(abs(fd), abs(slope), 1e-12)
        rows.append(GradientCheckRow(direction=i, fd_slope=fd, adjoint_slope=slope,
                                     rel_error=rel, nonsmooth=nonsmooth))
        logger.debug("direction %d: fd=%.10e adjoint=%.10e rel=%.2e", i, fd, slope, rel)
    return rows
