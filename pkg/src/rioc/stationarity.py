"""
Independent verification of optimality systems.

The checkers take raw trajectories (control, state, adjoint, multiplier),
recompute history and driving force themselves and evaluate every line of the
viscous strong-stationarity system or of the limit system. They never raise on
a violation; they report.

Weak forms are tested against the nodal hat functions phi_1..phi_N. With
lambda stored per interval, <lambda, v> = sum_k dt lambda_k v_{k+1}, so the
pairing with phi_m is dt lambda_{m-1}.
"""

import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from .model.base import StrEnum
from .model.grid import TimeGrid, Trajectory, require_same_grid
from .model.norms import h1_apply, h1_dual_norm, sup_norm
from .model.operators import history_values, step_drive_values
from .model.params import ModelParams, ObjectiveSpec
from .sensitivity import ActivationLabel, classify_z, default_tol_z

logger = logging.getLogger(__name__)


class StationarityType(StrEnum):
    """Outcome of a stationarity classification."""
    STRONG = "strong"
    C = "C"
    INCONCLUSIVE = "inconclusive"


class StationarityReport(BaseModel):
    """Residuals and violation measures for each line of an optimality system."""

    system: Literal["viscous", "limit"]
    adjoint_residual: float = Field(..., ge=0, description="Weak adjoint residual, max over hats, per unit time")
    terminal_residual: float = Field(default=0.0, ge=0, description="|xi(T) - (q(T) - q_d)|")
    sign_violation: float = Field(default=0.0, ge=0, description="Sign-rule violation on labeled steps")
    complementarity_xi: float = Field(..., ge=0, description="max |q'^i xi^i|")
    complementarity_lambda: float = Field(..., ge=0, description="max over hats |<lambda^i, z^i v>|")
    gradient_residual: float = Field(..., ge=0, description="H^1_0 dual norm of the gradient identity")
    mstat_gap: float = Field(default=0.0, ge=0, description="max |lambda xi|, informational")
    threshold: float = Field(..., gt=0, description="Pass threshold used for the classification")
    classification: StationarityType

    # limit system only
    affine_checks: bool = False
    bracket_violation: Optional[float] = Field(default=None, ge=0)
    one_sign_violation: Optional[float] = Field(default=None, ge=0)
    lxi_violation: Optional[float] = Field(default=None, ge=0)
    attained_target_residual: Optional[float] = Field(default=None, ge=0)
    same_sign_violation: float = Field(default=0.0, ge=0, description="xi lambda >= 0 on the biactive set")
    nc1_violation: float = Field(default=0.0, ge=0)
    nc2_violation: float = Field(default=0.0, ge=0)
    nc3_violation: float = Field(default=0.0, ge=0)
    strongly_active_steps: int = 0
    inactive_steps: int = 0
    biactive_steps: int = 0

    def passed(self, tol: Optional[float] = None) -> bool:
        """True when the residuals of the system's equations are within ``tol`` (default: threshold)."""
        tol = self.threshold if tol is None else tol
        if self.system == "viscous":
            checked = [self.adjoint_residual, self.terminal_residual, self.sign_violation,
                       self.gradient_residual]
        else:
            checked = [self.adjoint_residual, self.complementarity_xi, self.complementarity_lambda,
                       self.gradient_residual]
        return all(value <= tol for value in checked)


def pass_threshold(grid_dt: float, grad_tol: float, scale: float) -> float:
    """10 max(grad_tol, dt) (1 + scale)."""
    return 10.0 * max(grad_tol, grid_dt) * (1.0 + scale)


def _gradient_identity(grid: TimeGrid, ell: Trajectory, lam: Trajectory, obj: ObjectiveSpec,
                       include_proximal: bool) -> np.ndarray:
    """Values of v -> <lambda, v> + (ell, v)_H1 [+ (ell - anchor, v)_H1] on the hats phi_1..phi_N."""
    u = ell.values
    if include_proximal:
        u = 2.0 * u - obj.proximal_anchor.values
    return h1_apply(grid, u)[1:] + grid.dt * lam.values


class _Tuple:
    """Quantities recomputed from a raw (ell, q, xi, lam) tuple."""

    def __init__(self, ell: Trajectory, q: Trajectory, xi: Trajectory, lam: Trajectory,
                 params: ModelParams, obj: ObjectiveSpec):
        self.grid = require_same_grid(ell, q, xi, lam)
        if not lam.per_interval:
            raise ValueError("lambda must be given per interval")
        for name, tr in (("ell", ell), ("q", q), ("xi", xi), ("lam", lam)):
            if tr.n != params.n:
                raise ValueError(f"{name} has dimension {tr.n}, model has n={params.n}")
        self.dt = self.grid.dt
        self.q = q.values
        self.xi = xi.values
        self.lam = lam.values
        self.H = history_values(self.q, params.y0, self.dt)
        self.drive = step_drive_values(self.q, ell.values, self.H, params.alpha, params.kappa)
        self.qdot = np.diff(self.q, axis=0) / self.dt
        self.misfit = self.q[-1] - obj.q_d

    def adjoint_residual(self, params: ModelParams, obj: ObjectiveSpec) -> float:
        """max_m |weak adjoint residual on phi_m| / dt, with xi(T) replaced by the terminal data."""
        dt = self.dt
        kp = params.kappa.deriv(self.H[:-1])
        B = np.zeros_like(self.xi)
        B[:-1] = np.cumsum((dt * kp * self.lam)[::-1], axis=0)[::-1]
        xi = self.xi.copy()
        xi[-1] = self.misfit
        jp = obj.j_prime(self.q)[:-1]
        r = xi[:-1] - xi[1:] - dt * jp + params.alpha * dt * self.lam + 0.5 * dt * (B[:-1] + B[1:])
        return float(np.max(np.abs(r))) / dt

    def complementarity_xi(self) -> float:
        return float(np.max(np.abs(self.qdot * self.xi[:-1])))

    def complementarity_lambda(self) -> float:
        return float(np.max(np.abs(self.dt * self.lam * self.drive)))

    def mstat_gap(self) -> float:
        return float(np.max(np.abs(self.lam * self.xi[:-1])))


def check_viscous(ell: Trajectory, q: Trajectory, xi: Trajectory, lam: Trajectory,
                  params: ModelParams, obj: ObjectiveSpec, tol_z: Optional[float] = None,
                  grad_tol: float = 1e-6) -> StationarityReport:
    """Evaluate the viscous strong-stationarity system on a raw tuple."""
    tup = _Tuple(ell, q, xi, lam, params, obj)
    tol_z = default_tol_z(ell) if tol_z is None else tol_z
    eps_h = params.epsilon + params.alpha * tup.dt
    pattern = classify_z(tup.drive, tol_z)
    lam_v, xi_next = tup.lam, tup.xi[1:]

    violation = np.zeros_like(lam_v)
    pos = pattern == ActivationLabel.POSITIVE
    neg = pattern == ActivationLabel.NEGATIVE
    zero = pattern == ActivationLabel.ZERO
    violation[pos] = np.abs(lam_v - xi_next / eps_h)[pos]
    violation[neg] = np.abs(lam_v)[neg]
    upper = np.maximum(xi_next, 0.0) / eps_h
    violation[zero] = (np.maximum(-lam_v, 0.0) + np.maximum(lam_v - upper, 0.0))[zero]

    functional = _gradient_identity(tup.grid, ell, lam, obj, obj.include_proximal)
    scale = sup_norm(ell) + float(np.max(np.abs(obj.q_d)))
    threshold = pass_threshold(tup.dt, grad_tol, scale)
    adjoint_res = tup.adjoint_residual(params, obj)
    terminal_res = float(np.max(np.abs(tup.xi[-1] - tup.misfit)))
    sign_violation = float(np.max(violation))
    gradient_res = h1_dual_norm(tup.grid, functional)

    # strong only when every line of the system holds, the gradient identity included
    strong = max(adjoint_res, terminal_res, sign_violation, gradient_res) <= threshold
    report = StationarityReport(
        system="viscous",
        adjoint_residual=adjoint_res,
        terminal_residual=terminal_res,
        sign_violation=sign_violation,
        complementarity_xi=tup.complementarity_xi(),
        complementarity_lambda=tup.complementarity_lambda(),
        gradient_residual=gradient_res,
        mstat_gap=tup.mstat_gap(),
        threshold=threshold,
        classification=StationarityType.STRONG if strong else StationarityType.INCONCLUSIVE,
    )
    logger.debug("viscous check: %s", report.classification)
    return report


def _corner_product_violation(xi: np.ndarray, mu: np.ndarray) -> float:
    """max over (t, m) of max(0, -xi(t) mu_m); bilinear, so the box corners suffice."""
    corners = [a * b for a in (xi.min(), xi.max()) for b in (mu.min(), mu.max())]
    return max(0.0, -min(corners))


def check_limit(ell_bar: Trajectory, q_bar: Trajectory, xi: Trajectory, lam: Trajectory,
                params: ModelParams, obj: ObjectiveSpec, tol: float = 1e-3,
                tol_z: Optional[float] = None) -> StationarityReport:
    """
    Evaluate the limit optimality system on a candidate tuple.

    ``tol_z`` is the band used to decide q' = 0 and z = 0 for the taxonomy;
    it defaults to the complementarity tolerance 10 dt (1 + |ell|_inf).
    """
    tup = _Tuple(ell_bar, q_bar, xi, lam, params, obj)
    dt = tup.dt
    if tol_z is None:
        tol_z = 10.0 * dt * (1.0 + sup_norm(ell_bar))
    mass = dt * tup.lam
    xi_step = tup.xi[:-1]

    rate_up = tup.qdot > tol_z
    z_zero = np.abs(tup.drive) <= tol_z
    z_neg = tup.drive < -tol_z
    strongly_active = rate_up & z_zero
    inactive = ~rate_up & z_neg
    biactive = ~rate_up & z_zero

    def _masked_max(values: np.ndarray, mask: np.ndarray) -> float:
        return float(np.max(values[mask])) if np.any(mask) else 0.0

    nc1 = _masked_max(np.abs(xi_step), strongly_active)
    nc2 = _masked_max(np.abs(mass), inactive)
    nc3 = _masked_max(np.maximum(np.maximum(-xi_step, 0.0), np.maximum(-mass, 0.0)), biactive)
    same_sign = _masked_max(np.maximum(-xi_step * mass, 0.0), biactive)

    functional = _gradient_identity(tup.grid, ell_bar, lam, obj, include_proximal=False)
    report_kwargs = dict(
        system="limit",
        adjoint_residual=tup.adjoint_residual(params, obj),
        complementarity_xi=tup.complementarity_xi(),
        complementarity_lambda=tup.complementarity_lambda(),
        gradient_residual=h1_dual_norm(tup.grid, functional),
        mstat_gap=tup.mstat_gap(),
        threshold=tol,
        same_sign_violation=same_sign,
        nc1_violation=nc1,
        nc2_violation=nc2,
        nc3_violation=nc3,
        strongly_active_steps=int(np.count_nonzero(strongly_active)),
        inactive_steps=int(np.count_nonzero(inactive)),
        biactive_steps=int(np.count_nonzero(biactive)),
    )

    affine = params.kappa.is_affine and obj.is_affine
    terminal_ok = bool(np.all(tup.misfit >= -tol))
    if affine:
        bracket = one_sign = lxi = attained = 0.0
        for i, d in enumerate(tup.misfit):
            xi_i, mu_i = tup.xi[:, i], mass[:, i]
            lo, hi = (0.0, d) if d >= 0 else (d, 0.0)
            bracket = max(bracket, float(np.max(np.maximum(lo - xi_i, 0.0) + np.maximum(xi_i - hi, 0.0))))
            if abs(d) <= tol:
                attained = max(attained, float(np.max(np.abs(xi_i))), float(np.max(np.abs(mu_i))))
                continue
            sign = 1.0 if d > 0 else -1.0
            one_sign = max(one_sign, float(np.max(np.maximum(-sign * mu_i, 0.0))))
            lxi = max(lxi, _corner_product_violation(xi_i, mu_i))
        same_sign_ok = lxi <= tol
        strong = same_sign_ok and terminal_ok and max(bracket, one_sign, nc3) <= tol
        report_kwargs.update(
            affine_checks=True,
            bracket_violation=bracket,
            one_sign_violation=one_sign,
            lxi_violation=lxi,
            attained_target_residual=attained,
        )
    else:
        same_sign_ok = same_sign <= tol
        strong = same_sign_ok and terminal_ok and nc3 <= tol

    if strong:
        classification = StationarityType.STRONG
    elif same_sign_ok:
        classification = StationarityType.C
    else:
        classification = StationarityType.INCONCLUSIVE
    report = StationarityReport(classification=classification, **report_kwargs)
    logger.debug("limit check: %s (affine checks: %s)", classification, affine)
    return report


def mstat_gap_probe(xi: Trajectory, lam: Trajectory) -> float:
    """max over steps of |lambda_k xi_k|; reported, never asserted."""
    if not lam.per_interval:
        raise ValueError("lambda must be given per interval")
    require_same_grid(xi, lam)
    return float(np.max(np.abs(lam.values * xi.values[:-1])))
