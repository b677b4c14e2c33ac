"""
Gradient-based solution of the viscous control problems and the
vanishing-viscosity sweep.

minimize_viscous runs Armijo-backtracked steepest descent in the discrete
H^1_0 metric: d = -g with g the Riesz representative from the adjoint. The
sweep walks down a decreasing list of viscosities, warm-starting each problem
from the previous optimum and anchoring its proximal term there.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator
from typing_extensions import Self

from .adjoint import AdjointSolution, h1_gradient_norm, reduced_gradient, solve_adjoint
from .errors import LineSearchError, ValidationError
from .forward import ForwardSolution, solve, solve_rate_independent, solve_viscous
from .model.base import ARRAY_MODEL_CONFIG
from .model.grid import Trajectory
from .model.norms import dual_w1inf_proxy, h1_norm, l2_norm, sup_norm
from .model.params import ModelParams, ObjectiveSpec
from .stationarity import StationarityReport, check_viscous

logger = logging.getLogger(__name__)

# half-decade steps from 1e-1 down to 1e-4
DEFAULT_EPS_LIST = tuple(float(10.0 ** -(1.0 + 0.5 * i)) for i in range(7))


class OptimizeOptions(BaseModel):
    """Descent and line-search settings."""

    max_iters: int = Field(default=200, ge=0, description="Maximum descent iterations")
    c1: float = Field(default=1e-4, gt=0, lt=1, description="Armijo sufficient-decrease constant")
    backtrack: float = Field(default=0.5, gt=0, lt=1, description="Step reduction factor")
    initial_step: float = Field(default=1.0, gt=0, description="Trial step of every line search")
    max_halvings: int = Field(default=60, ge=1, description="Backtracking steps before giving up")
    grad_tol: float = Field(default=1e-6, gt=0, description="Stop when ||g||_H1 <= grad_tol")
    epsilon: Optional[float] = Field(default=None, gt=0, description="Overrides the model viscosity")
    include_proximal: bool = Field(default=False, description="Add the proximal term")
    anchor: Optional[Trajectory] = Field(default=None, description="Proximal anchor")
    log_every: int = Field(default=10, ge=1, description="INFO log cadence in iterations")

    model_config = ARRAY_MODEL_CONFIG

    @model_validator(mode="after")
    def validate_anchor(self) -> Self:
        if self.include_proximal and self.anchor is None:
            raise ValueError("include_proximal requires an anchor")
        return self


class IterateLogEntry(BaseModel):
    iteration: int
    objective: float
    grad_norm: float
    step: float
    halvings: int


class OptimizationResult(BaseModel):
    """Final control with its forward and adjoint solutions and the iterate log."""

    model_config = ARRAY_MODEL_CONFIG

    ell: Trajectory
    forward: ForwardSolution
    adjoint: AdjointSolution
    gradient: Trajectory
    objective: float
    grad_norm: float
    iterations: int
    converged: bool
    log: List[IterateLogEntry]


class SweepRow(BaseModel):
    """Measurements for one viscosity of a sweep."""

    epsilon: float
    objective_init: float
    objective: float
    ell_distance_h1: float = Field(default=0.0, description="||ell_eps - ell_ref||_H1")
    q_distance_c0: float = Field(default=0.0, description="||q_eps - q_ref||_C0")
    xi_sup: float
    lambda_dual_proxy: float
    lambda_l2: float
    iterations: int
    converged: bool
    stationarity: StationarityReport


class SweepReport(BaseModel):
    """Rows ordered by strictly decreasing viscosity, plus the smallest-eps optimum."""

    model_config = ARRAY_MODEL_CONFIG

    rows: List[SweepRow]
    limit_candidate: OptimizationResult
    reference_q: Trajectory

    @field_validator("rows")
    @classmethod
    def validate_order(cls, rows: List[SweepRow]) -> List[SweepRow]:
        eps = [row.epsilon for row in rows]
        if any(a <= b for a, b in zip(eps, eps[1:])):
            raise ValueError("sweep rows must have strictly decreasing epsilon")
        return rows


def evaluate_objective(ell: Trajectory, params: ModelParams, obj: ObjectiveSpec) -> float:
    """Reduced objective with the forward solver matching ``params.epsilon`` (eps = 0 allowed)."""
    q = solve(params, ell, ell.grid).q
    return obj.evaluate(q, ell)


def _objective_with_anchor(obj: ObjectiveSpec, opts: OptimizeOptions) -> ObjectiveSpec:
    if opts.include_proximal:
        return obj.with_anchor(opts.anchor)
    return obj


def _state(params: ModelParams, ell: Trajectory, obj: ObjectiveSpec) -> Tuple[float, ForwardSolution]:
    sol = solve_viscous(params, ell, ell.grid)
    return obj.evaluate(sol.q, ell), sol


def minimize_viscous(ell0: Trajectory, params: ModelParams, obj: ObjectiveSpec,
                     opts: Optional[OptimizeOptions] = None) -> OptimizationResult:
    """Armijo steepest descent for the viscous reduced objective."""
    opts = opts or OptimizeOptions()
    if opts.epsilon is not None:
        params = params.with_epsilon(opts.epsilon)
    if params.epsilon <= 0:
        raise ValidationError(f"minimize_viscous needs epsilon > 0, got {params.epsilon}")
    if not ell0.zero_initial:
        raise ValidationError("initial control must be zero_initial")
    obj = _objective_with_anchor(obj, opts)
    grid = ell0.grid

    ell = ell0
    J, sol = _state(params, ell, obj)
    log: List[IterateLogEntry] = []
    converged = False
    iteration = 0
    while True:
        adj = solve_adjoint(params, ell, sol, obj)
        g = reduced_gradient(ell, adj, obj, grid)
        gnorm = h1_gradient_norm(g)
        if gnorm <= opts.grad_tol:
            converged = True
            break
        if iteration >= opts.max_iters:
            break

        slope = gnorm * gnorm
        step = opts.initial_step
        for halvings in range(opts.max_halvings + 1):
            trial = ell - step * g
            J_trial, sol_trial = _state(params, trial, obj)
            if J_trial <= J - opts.c1 * step * slope:
                break
            step *= opts.backtrack
        else:
            raise LineSearchError(
                f"no Armijo step after {opts.max_halvings} halvings at iteration {iteration} "
                f"(J={J:.6e}, |g|={gnorm:.3e})"
            )
        iteration += 1
        ell, J, sol = trial, J_trial, sol_trial
        log.append(IterateLogEntry(iteration=iteration, objective=J, grad_norm=gnorm,
                                   step=step, halvings=halvings))
        if iteration % opts.log_every == 0:
            logger.info("iter %d: J=%.8e |g|=%.3e step=%.3e", iteration, J, gnorm, step)

    logger.info("eps=%g finished after %d iterations: J=%.8e |g|=%.3e converged=%s",
                params.epsilon, iteration, J, gnorm, converged)
    return OptimizationResult(ell=ell, forward=sol, adjoint=adj, gradient=g, objective=J,
                              grad_norm=gnorm, iterations=iteration, converged=converged, log=log)


def _row(eps: float, objective_init: float, result: OptimizationResult, params: ModelParams,
         obj: ObjectiveSpec, grad_tol: float) -> SweepRow:
    report = check_viscous(result.ell, result.forward.q, result.adjoint.xi, result.adjoint.lam,
                           params.with_epsilon(eps), obj, grad_tol=grad_tol)
    return SweepRow(
        epsilon=eps,
        objective_init=objective_init,
        objective=result.objective,
        xi_sup=sup_norm(result.adjoint.xi),
        lambda_dual_proxy=dual_w1inf_proxy(result.adjoint.lam),
        lambda_l2=l2_norm(result.adjoint.lam),
        iterations=result.iterations,
        converged=result.converged,
        stationarity=report,
    )


def vanishing_viscosity_sweep(eps_list: Sequence[float], params: ModelParams, obj: ObjectiveSpec,
                              ell0: Trajectory, opts: Optional[OptimizeOptions] = None,
                              warm_start: bool = True, workers: int = 1) -> SweepReport:
    """
    Solve the viscous problem for every eps in ``eps_list`` (strictly decreasing).

    Warm-started sweeps run sequentially: row k starts from the optimum of
    row k-1 and anchors its proximal term there (row 0 uses ``ell0``, or the
    objective's own anchor when it has one). Cold-start sweeps solve every
    row from ``ell0`` with anchor ``ell0`` and may use ``workers`` threads.
    The final row's control defines the reference: ell_ref, and q_ref from
    the rate-independent solver.
    """
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValidationError("eps_list is empty")
    if any(e <= 0 for e in eps_list) or any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError(f"eps_list must be positive and strictly decreasing, got {eps_list}")
    opts = opts or OptimizeOptions()
    base_obj = obj.with_anchor(None, include_proximal=False)
    first_anchor = obj.proximal_anchor if obj.proximal_anchor is not None else ell0

    def _solve_row(eps: float, start: Trajectory,
                   anchor: Trajectory) -> Tuple[float, ObjectiveSpec, OptimizationResult]:
        row_opts = opts.model_copy(update={"epsilon": eps, "include_proximal": True, "anchor": anchor})
        row_obj = _objective_with_anchor(base_obj, row_opts)
        objective_init = row_obj.evaluate(solve_viscous(params.with_epsilon(eps), start, start.grid).q, start)
        return objective_init, row_obj, minimize_viscous(start, params, base_obj, row_opts)

    solved: List[Tuple[float, ObjectiveSpec, OptimizationResult]] = []
    if warm_start:
        start, anchor = ell0, first_anchor
        for eps in eps_list:
            solved.append(_solve_row(eps, start, anchor))
            start = anchor = solved[-1][2].ell
            logger.info("sweep eps=%g J=%.8e iters=%d", eps, solved[-1][2].objective, solved[-1][2].iterations)
    else:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            futures = [pool.submit(_solve_row, eps, ell0, first_anchor) for eps in eps_list]
            solved = [f.result() for f in futures]

    limit = solved[-1][2]
    ell_ref = limit.ell
    q_ref = solve_rate_independent(params, ell_ref, ell_ref.grid).q
    rows = []
    for eps, (objective_init, row_obj, result) in zip(eps_list, solved):
        row = _row(eps, objective_init, result, params, row_obj, opts.grad_tol)
        row.ell_distance_h1 = h1_norm(result.ell - ell_ref)
        row.q_distance_c0 = sup_norm(result.forward.q - q_ref)
        rows.append(row)
    return SweepReport(rows=rows, limit_candidate=limit, reference_q=q_ref)
