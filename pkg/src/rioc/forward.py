"""
Forward solvers for the viscous ODE and the rate-independent system.

Both solvers march componentwise in closed form. With the history lagged,
w = ell_{k+1} - kappa(H_k) and

    viscous:            q_{k+1} = q_k                                  if w - alpha q_k <= 0
                        q_{k+1} = (q_k + (dt/eps) w) / (1 + alpha dt/eps)   otherwise
    rate-independent:   q_{k+1} = max(q_k, w / alpha)

after which H_{k+1} = H_k + dt (q_k + q_{k+1}) / 2.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from .errors import ValidationError
from .model.base import ARRAY_MODEL_CONFIG
from .model.grid import TimeGrid, Trajectory
from .model.norms import sup_norm, w11_norm
from .model.operators import history_values, step_drive_values, z_field
from .model.params import ModelParams

logger = logging.getLogger(__name__)

TOL_FEAS = 1e-10


def tol_comp(grid: TimeGrid, ell: Trajectory) -> float:
    """Complementarity tolerance 10 dt (1 + |ell|_inf)."""
    return 10.0 * grid.dt * (1.0 + sup_norm(ell))


class ForwardSolution(BaseModel):
    """
    Discrete state trajectory with its rates, driving force and history.

    ``step_drive`` is the lagged driving force of every time step
    (-alpha q_{k+1} + ell_{k+1} - kappa(H_k)); its sign matches the branch the
    solver took on that step and is what activation patterns classify.
    ``energy_residual`` is the per-node energy-balance residual.
    """

    model_config = ARRAY_MODEL_CONFIG

    q: Trajectory
    qdot: Trajectory
    z: Trajectory
    H: Trajectory
    step_drive: Trajectory
    epsilon: float = Field(..., ge=0)
    energy_residual: np.ndarray

    @property
    def grid(self) -> TimeGrid:
        return self.q.grid

    @property
    def active_steps(self) -> np.ndarray:
        """Boolean (N, n) mask of steps on which q increased."""
        return self.qdot.values > 0


def _validate_inputs(params: ModelParams, ell: Trajectory, grid: TimeGrid) -> None:
    if ell.grid != grid:
        raise ValidationError(f"control lives on {ell.grid}, solver grid is {grid}")
    if ell.per_interval:
        raise ValidationError("control must be sampled on nodes")
    if ell.n != params.n:
        raise ValidationError(f"control has dimension {ell.n}, model has n={params.n}")


def _march(params: ModelParams, ell: Trajectory, grid: TimeGrid) -> ForwardSolution:
    N, dt = grid.N, grid.dt
    alpha, eps = params.alpha, params.epsilon
    kappa = params.kappa
    L = ell.values
    q = np.zeros((N + 1, params.n))
    H = np.zeros((N + 1, params.n))
    H[0] = params.y0

    if eps > 0:
        ratio = dt / eps
        denom = 1.0 + alpha * ratio
        for k in range(N):
            w = L[k + 1] - kappa.eval(H[k])
            qk = q[k]
            q[k + 1] = np.where(w - alpha * qk > 0, (qk + ratio * w) / denom, qk)
            H[k + 1] = H[k] + 0.5 * dt * (qk + q[k + 1])
    else:
        for k in range(N):
            w = L[k + 1] - kappa.eval(H[k])
            q[k + 1] = np.maximum(q[k], w / alpha)
            H[k + 1] = H[k] + 0.5 * dt * (q[k] + q[k + 1])

    q_tr = Trajectory(grid=grid, values=q, zero_initial=True)
    qdot = Trajectory(grid=grid, values=np.diff(q, axis=0) / dt, per_interval=True)
    drive = step_drive_values(q, L, H, alpha, kappa)
    residual = _energy_residual_values(q, H, L, dt, params)
    logger.debug("forward solve eps=%g N=%d n=%d active steps=%d",
                 eps, N, params.n, int(np.count_nonzero(qdot.values > 0)))
    return ForwardSolution(
        q=q_tr,
        qdot=qdot,
        z=z_field(q_tr, ell, params),
        H=Trajectory(grid=grid, values=H),
        step_drive=Trajectory(grid=grid, values=drive, per_interval=True),
        epsilon=eps,
        energy_residual=residual,
    )


def solve_viscous(params: ModelParams, ell: Trajectory, grid: TimeGrid) -> ForwardSolution:
    """Semi-implicit solve of eps q' = max(z, 0) with lagged history."""
    if params.epsilon <= 0:
        raise ValidationError(f"solve_viscous needs epsilon > 0, got {params.epsilon}")
    _validate_inputs(params, ell, grid)
    return _march(params, ell, grid)


def solve_rate_independent(params: ModelParams, ell: Trajectory, grid: TimeGrid) -> ForwardSolution:
    """Time-incremental complementarity solve; ``params.epsilon`` is ignored."""
    _validate_inputs(params, ell, grid)
    return _march(params.with_epsilon(0.0), ell, grid)


def solve(params: ModelParams, ell: Trajectory, grid: TimeGrid) -> ForwardSolution:
    """Dispatch on the viscosity: eps > 0 viscous, eps = 0 rate-independent."""
    if params.is_viscous:
        return solve_viscous(params, ell, grid)
    return solve_rate_independent(params, ell, grid)


# Energy balance

def _energy_residual_values(q: np.ndarray, H: np.ndarray, L: np.ndarray, dt: float,
                            params: ModelParams) -> np.ndarray:
    dq = np.diff(q, axis=0)
    kappa_bar = 0.5 * (params.kappa.eval(H[:-1]) + params.kappa.eval(H[1:]))
    dissipation = np.sum(kappa_bar * dq, axis=1)
    viscous = params.epsilon * np.sum(dq * dq, axis=1) / dt
    power = np.sum(np.diff(L, axis=0) * 0.5 * (q[:-1] + q[1:]), axis=1)
    energy = 0.5 * params.alpha * np.sum(q * q, axis=1) - np.sum(L * q, axis=1)
    out = np.zeros(q.shape[0])
    out[1:] = np.cumsum(dissipation + viscous + power) + energy[1:] - energy[0]
    return np.abs(out)


def energy_balance_residual(sol: ForwardSolution, ell: Trajectory, params: ModelParams) -> Trajectory:
    """
    Per-node residual of the energy balance

        int kappa(H) q' + eps int |q'|^2 + E(t, q(t)) - E(0, q(0)) + int <ell', q> = 0

    with trapezoidal quadrature. The eps-term is absent for rate-independent solutions.
    """
    if ell.grid != sol.grid:
        raise ValidationError("control and solution live on different grids")
    p = params.with_epsilon(sol.epsilon)
    values = _energy_residual_values(sol.q.values, sol.H.values, ell.values, sol.grid.dt, p)
    return Trajectory(grid=sol.grid, values=values)


# Residuals of the rate-independent system

def feasibility_violation(sol: ForwardSolution) -> float:
    """max over steps/components of the lagged driving force (should be <= TOL_FEAS)."""
    return float(np.max(sol.step_drive.values))


def complementarity_residual(sol: ForwardSolution) -> float:
    """max |dq_i * z_i| over steps, with z the lagged driving force."""
    dq = np.diff(sol.q.values, axis=0)
    return float(np.max(np.abs(dq * sol.step_drive.values)))


# Studies

def vanishing_viscosity_gap(params: ModelParams, ell: Trajectory, grid: TimeGrid,
                            eps_list: Sequence[float]) -> List[float]:
    """C^0 distance between the viscous solution and the rate-independent one for each eps."""
    reference = solve_rate_independent(params, ell, grid).q
    gaps = []
    for eps in eps_list:
        q_eps = solve_viscous(params.with_epsilon(eps), ell, grid).q
        gaps.append(sup_norm(q_eps - reference))
        logger.debug("eps=%g gap=%.3e", eps, gaps[-1])
    return gaps


def lipschitz_ratio(params: ModelParams, ell1: Trajectory, ell2: Trajectory,
                    grid: TimeGrid) -> Optional[float]:
    """|S(ell1) - S(ell2)|_C0 / |ell1 - ell2|_W11, or None for identical controls."""
    denom = w11_norm(ell1 - ell2)
    if denom == 0.0:
        return None
    q1 = solve(params, ell1, grid).q
    q2 = solve(params, ell2, grid).q
    return sup_norm(q1 - q2) / denom
