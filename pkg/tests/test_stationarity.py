"""
Test cases for the stationarity checkers.
"""

import numpy as np
import pytest

from rioc.adjoint import h1_gradient_norm, reduced_gradient, solve_adjoint
from rioc.forward import solve_rate_independent, solve_viscous
from rioc.model.degradation import ConstantDegradation, SaturatingDegradation
from rioc.model.grid import TimeGrid, Trajectory
from rioc.model.params import ModelParams, ObjectiveSpec
from rioc.stationarity import (
    StationarityReport,
    StationarityType,
    check_limit,
    check_viscous,
    mstat_gap_probe,
    pass_threshold,
)


def _viscous_tuple():
    grid = TimeGrid(T=1.0, N=200)
    params = ModelParams(alpha=1.0, epsilon=0.1, y0=[0.0],
                         kappa=SaturatingDegradation(base=0.4995, lipschitz=0.2, scale=1.0))
    ell = Trajectory.ramp(grid, 2.0)
    obj = ObjectiveSpec(q_d=[1.0])
    sol = solve_viscous(params, ell, grid)
    adj = solve_adjoint(params, ell, sol, obj)
    return params, obj, ell, sol, adj


def _target_below_state_tuple(xi_value: float = 0.1, lam_value: float = 0.0):
    """ell = 0.1t below kappa = 0.5, q = 0, q_d = -0.1."""
    grid = TimeGrid(T=1.0, N=100)
    params = ModelParams(alpha=1.0, y0=[0.0], kappa=ConstantDegradation(value=0.5))
    obj = ObjectiveSpec(q_d=[-0.1])
    ell = Trajectory.ramp(grid, 0.1)
    q = Trajectory.zeros(grid, 1)
    xi = Trajectory.constant(grid, xi_value)
    lam = Trajectory(grid=grid, values=np.full(100, lam_value), per_interval=True)
    return params, obj, ell, q, xi, lam


def _active_state_tuple():
    """
    Play operator driven by ell = min(t, 1.6 - t) with kappa = 0.5, q_d = 0.1.

    q rises on (0.5, 0.8] and stays at 0.3. The adjoint is zero up to the last
    rising step K, equal to the misfit d after it, and lambda carries the jump
    as a single mass d / alpha at step K.
    """
    grid = TimeGrid(T=1.0, N=100)
    params = ModelParams(alpha=1.0, y0=[0.0], kappa=ConstantDegradation(value=0.5))
    obj = ObjectiveSpec(q_d=[0.1])
    t = grid.nodes
    ell = Trajectory(grid=grid, values=np.minimum(t, 1.6 - t), zero_initial=True)
    q = solve_rate_independent(params, ell, grid).q
    d = float(q.values[-1, 0] - 0.1)
    K = int(np.flatnonzero(np.diff(q.values[:, 0]) > 0)[-1])
    xi = np.zeros(101)
    xi[K + 1:] = d
    lam = np.zeros(100)
    lam[K] = d / (params.alpha * grid.dt)
    return (params, obj, ell, q, Trajectory(grid=grid, values=xi),
            Trajectory(grid=grid, values=lam, per_interval=True))


class TestPassThreshold:
    """Test pass_threshold."""

    def test_value(self):
        assert pass_threshold(0.01, 1e-6, 2.0) == pytest.approx(0.3)
        assert pass_threshold(1e-4, 1e-3, 0.0) == pytest.approx(1e-2)


class TestCheckViscous:
    """Test check_viscous."""

    def test_exact_adjoint_off_optimum_is_inconclusive(self):
        """Test the adjoint lines hold but a nonzero gradient blocks the strong label."""
        params, obj, ell, sol, adj = _viscous_tuple()
        report = check_viscous(ell, sol.q, adj.xi, adj.lam, params, obj)
        assert report.system == "viscous"
        assert report.adjoint_residual <= 1e-10
        assert report.terminal_residual <= 1e-14
        assert report.sign_violation == 0.0
        assert report.gradient_residual > report.threshold
        assert report.classification == StationarityType.INCONCLUSIVE
        assert not report.passed()

    def test_zero_tuple_is_strong(self):
        grid = TimeGrid(T=1.0, N=50)
        params = ModelParams(alpha=1.0, epsilon=0.1, y0=[0.0], kappa=ConstantDegradation(value=0.5))
        obj = ObjectiveSpec(q_d=[0.0])
        zeros = Trajectory.zeros(grid, 1)
        lam = Trajectory.zeros(grid, 1, per_interval=True)
        report = check_viscous(zeros, zeros, zeros, lam, params, obj)
        assert report.gradient_residual == 0.0
        assert report.classification == StationarityType.STRONG
        assert report.passed()

    def test_gradient_residual_matches_reduced_gradient(self):
        """Test the recomputed gradient identity agrees with the optimizer's gradient norm."""
        params, obj, ell, sol, adj = _viscous_tuple()
        report = check_viscous(ell, sol.q, adj.xi, adj.lam, params, obj)
        expected = h1_gradient_norm(reduced_gradient(ell, adj, obj, ell.grid))
        assert report.gradient_residual == pytest.approx(expected, rel=1e-10)

    def test_gradient_residual_matches_with_proximal_term(self):
        params, obj, ell, sol, adj = _viscous_tuple()
        prox = obj.with_anchor(Trajectory.ramp(ell.grid, 1.0))
        report = check_viscous(ell, sol.q, adj.xi, adj.lam, params, prox)
        expected = h1_gradient_norm(reduced_gradient(ell, adj, prox, ell.grid))
        assert report.gradient_residual == pytest.approx(expected, rel=1e-10)
        plain = check_viscous(ell, sol.q, adj.xi, adj.lam, params, obj)
        assert report.gradient_residual != pytest.approx(plain.gradient_residual)

    def test_shifted_adjoint_is_inconclusive(self):
        params, obj, ell, sol, adj = _viscous_tuple()
        report = check_viscous(ell, sol.q, adj.xi + 0.5, adj.lam, params, obj)
        assert report.terminal_residual == pytest.approx(0.5)
        assert report.classification == StationarityType.INCONCLUSIVE

    def test_multiplier_on_inactive_steps(self):
        params, obj, ell, sol, adj = _viscous_tuple()
        lam = Trajectory(grid=adj.lam.grid, values=adj.lam.values + 1.0, per_interval=True)
        report = check_viscous(ell, sol.q, adj.xi, lam, params, obj)
        assert report.sign_violation == pytest.approx(1.0)
        assert report.classification == StationarityType.INCONCLUSIVE

    def test_complementarity_measures(self):
        params, obj, ell, sol, adj = _viscous_tuple()
        report = check_viscous(ell, sol.q, adj.xi, adj.lam, params, obj)
        assert report.complementarity_xi > 0.0
        assert report.mstat_gap == pytest.approx(mstat_gap_probe(adj.xi, adj.lam))

    def test_requires_interval_multiplier(self):
        params, obj, ell, sol, adj = _viscous_tuple()
        with pytest.raises(ValueError, match="per interval"):
            check_viscous(ell, sol.q, adj.xi, adj.xi, params, obj)

    def test_dimension_mismatch(self):
        params, obj, ell, sol, adj = _viscous_tuple()
        with pytest.raises(ValueError, match="q has dimension 2"):
            check_viscous(ell, Trajectory.zeros(ell.grid, 2), adj.xi, adj.lam, params, obj)


class TestCheckLimit:
    """Test check_limit and its affine-case rules."""

    def test_target_below_state_is_strong(self):
        params, obj, ell, q, xi, lam = _target_below_state_tuple()
        report = check_limit(ell, q, xi, lam, params, obj)
        assert report.system == "limit"
        assert report.affine_checks
        assert report.classification == StationarityType.STRONG
        assert report.bracket_violation == 0.0
        assert report.one_sign_violation == 0.0
        assert report.lxi_violation == 0.0
        assert report.inactive_steps == 100
        assert report.biactive_steps == 0

    def test_adjoint_outside_bracket_is_c(self):
        params, obj, ell, q, xi, lam = _target_below_state_tuple(xi_value=0.5)
        report = check_limit(ell, q, xi, lam, params, obj)
        assert report.bracket_violation == pytest.approx(0.4)
        assert report.classification == StationarityType.C

    def test_opposite_signs_are_inconclusive(self):
        params, obj, ell, q, xi, lam = _target_below_state_tuple(lam_value=-10.0)
        report = check_limit(ell, q, xi, lam, params, obj)
        assert report.one_sign_violation == pytest.approx(0.1)
        assert report.lxi_violation == pytest.approx(0.01)
        assert report.classification == StationarityType.INCONCLUSIVE

    def test_tolerance_is_threshold(self):
        params, obj, ell, q, xi, lam = _target_below_state_tuple()
        report = check_limit(ell, q, xi, lam, params, obj, tol=1e-2)
        assert report.threshold == 1e-2

    def test_active_state_is_strong(self):
        """Test a jump of xi carried by lambda on the last rising step."""
        params, obj, ell, q, xi, lam = _active_state_tuple()
        report = check_limit(ell, q, xi, lam, params, obj)
        assert report.affine_checks
        assert report.strongly_active_steps > 0
        assert report.adjoint_residual <= 1e-10
        assert report.complementarity_xi == 0.0
        assert report.complementarity_lambda <= 1e-12
        assert report.bracket_violation == 0.0
        assert report.one_sign_violation == 0.0
        assert report.nc1_violation == 0.0
        assert report.nc2_violation == 0.0
        assert report.classification == StationarityType.STRONG

    def test_attained_target_is_strong(self):
        params, _, ell, q, _, _ = _active_state_tuple()
        obj = ObjectiveSpec(q_d=q.values[-1])
        xi = Trajectory.zeros(ell.grid, 1)
        lam = Trajectory.zeros(ell.grid, 1, per_interval=True)
        report = check_limit(ell, q, xi, lam, params, obj)
        assert report.attained_target_residual == 0.0
        assert report.adjoint_residual == 0.0
        assert report.classification == StationarityType.STRONG

    def test_non_affine_data_skips_affine_rules(self):
        params, obj, ell, sol, adj = _viscous_tuple()
        report = check_limit(ell, sol.q, adj.xi, adj.lam, params, obj)
        assert not report.affine_checks
        assert report.bracket_violation is None
        assert report.lxi_violation is None
        total = report.strongly_active_steps + report.inactive_steps + report.biactive_steps
        assert total <= 200
        assert report.inactive_steps > 0


class TestStationarityReport:
    """Test StationarityReport helpers."""

    def test_type_str(self):
        assert str(StationarityType.STRONG) == "strong"
        assert str(StationarityType.C) == "C"
        assert StationarityType("inconclusive") == StationarityType.INCONCLUSIVE

    def test_passed_with_explicit_tolerance(self):
        report = StationarityReport(
            system="limit",
            adjoint_residual=1e-4,
            complementarity_xi=0.0,
            complementarity_lambda=0.0,
            gradient_residual=5e-3,
            threshold=1e-3,
            classification=StationarityType.C,
        )
        assert not report.passed()
        assert report.passed(1e-2)

    def test_mstat_gap_requires_interval_multiplier(self):
        grid = TimeGrid(T=1.0, N=4)
        with pytest.raises(ValueError, match="per interval"):
            mstat_gap_probe(Trajectory.zeros(grid, 1), Trajectory.zeros(grid, 1))

    def test_mstat_gap_vanishes_without_multiplier(self):
        grid = TimeGrid(T=1.0, N=4)
        xi = Trajectory(grid=grid, values=[1.0, -2.0, 3.0, 0.5, 0.0])
        assert mstat_gap_probe(xi, Trajectory.zeros(grid, 1, per_interval=True)) == 0.0

    def test_mstat_gap_disjoint_supports(self):
        grid = TimeGrid(T=1.0, N=4)
        xi = Trajectory(grid=grid, values=[1.0, 2.0, 0.0, 0.0, 5.0])
        lam = Trajectory(grid=grid, values=[0.0, 0.0, 4.0, -1.0], per_interval=True)
        assert mstat_gap_probe(xi, lam) == 0.0

    def test_mstat_gap_overlapping_supports(self):
        grid = TimeGrid(T=1.0, N=4)
        xi = Trajectory(grid=grid, values=[0.0, -2.0, 1.0, 0.0, 0.0])
        lam = Trajectory(grid=grid, values=[0.0, 3.0, 1.0, 0.0], per_interval=True)
        assert mstat_gap_probe(xi, lam) == pytest.approx(6.0)
