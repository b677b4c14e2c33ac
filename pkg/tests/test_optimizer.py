"""
Test cases for the descent method and the vanishing-viscosity sweep.
"""

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from rioc.adjoint import random_direction
from rioc.errors import LineSearchError, SolverError, ValidationError
from rioc.model.degradation import ConstantDegradation
from rioc.model.grid import TimeGrid, Trajectory
from rioc.model.norms import h1_norm
from rioc.model.params import ModelParams, ObjectiveSpec
from rioc.optimizer import (
    DEFAULT_EPS_LIST,
    OptimizeOptions,
    evaluate_objective,
    minimize_viscous,
    vanishing_viscosity_sweep,
)
from rioc.stationarity import StationarityType, check_limit, check_viscous


def _coercive_setup():
    """kappa = 0, j = 0, q_d = 0: the unique minimizer is ell = 0."""
    grid = TimeGrid(T=1.0, N=100)
    params = ModelParams(alpha=1.0, epsilon=0.1, y0=[0.0])
    return grid, params, ObjectiveSpec(q_d=[0.0])


def _target_below_state_setup():
    """q_d < 0 is never reached, the optimum keeps q = 0 and xi = 0.1."""
    grid = TimeGrid(T=1.0, N=100)
    params = ModelParams(alpha=1.0, y0=[0.0], kappa=ConstantDegradation(value=0.5))
    return grid, params, ObjectiveSpec(q_d=[-0.1]), Trajectory.ramp(grid, 0.8)


def _attained_target_setup():
    """q_d = 0 is reached by every control below kappa = 0.5: xi = 0 and lambda = 0 at the limit."""
    grid = TimeGrid(T=1.0, N=100)
    params = ModelParams(alpha=1.0, y0=[0.0], kappa=ConstantDegradation(value=0.5))
    return grid, params, ObjectiveSpec(q_d=[0.0]), Trajectory.ramp(grid, 0.8)


def _tracking_setup():
    """ell0 = 1.5t overshoots q_d = 0.1 by far; the optimum switches the state off."""
    grid = TimeGrid(T=1.0, N=100)
    params = ModelParams(alpha=1.0, epsilon=0.1, y0=[0.0], kappa=ConstantDegradation(value=0.2))
    return grid, params, ObjectiveSpec(q_d=[0.1]), Trajectory.ramp(grid, 1.5)


def _biactive_setup():
    grid = TimeGrid(T=1.0, N=200)
    params = ModelParams(alpha=1.0, y0=[0.0], kappa=ConstantDegradation(value=0.1))
    return grid, params, ObjectiveSpec(q_d=[0.5]), Trajectory.ramp(grid, 0.3)


class TestOptimizeOptions:
    """Test OptimizeOptions validation."""

    def test_defaults(self):
        opts = OptimizeOptions()
        assert opts.max_iters == 200
        assert opts.backtrack == 0.5
        assert opts.epsilon is None
        assert not opts.include_proximal

    def test_proximal_requires_anchor(self):
        with pytest.raises(PydanticValidationError, match="requires an anchor"):
            OptimizeOptions(include_proximal=True)

    def test_armijo_constant_range(self):
        with pytest.raises(PydanticValidationError):
            OptimizeOptions(c1=1.5)

    def test_default_eps_list(self):
        assert len(DEFAULT_EPS_LIST) == 7
        assert DEFAULT_EPS_LIST[0] == pytest.approx(0.1)
        assert DEFAULT_EPS_LIST[-1] == pytest.approx(1e-4)
        assert all(a > b for a, b in zip(DEFAULT_EPS_LIST, DEFAULT_EPS_LIST[1:]))


class TestMinimizeViscous:
    """Test minimize_viscous."""

    def test_converges_to_zero_control(self):
        grid, params, obj = _coercive_setup()
        ell0 = random_direction(grid, 1, np.random.default_rng(5))
        result = minimize_viscous(ell0, params, obj, OptimizeOptions(grad_tol=1e-7, max_iters=500))
        assert result.converged
        assert result.grad_norm <= 1e-7
        assert h1_norm(result.ell) <= 1e-6
        assert result.objective < evaluate_objective(ell0, params, obj)

    def test_log_is_monotone(self):
        grid, params, obj = _coercive_setup()
        ell0 = random_direction(grid, 1, np.random.default_rng(6))
        result = minimize_viscous(ell0, params, obj, OptimizeOptions(grad_tol=1e-7, max_iters=500))
        objectives = [entry.objective for entry in result.log]
        assert len(objectives) == result.iterations
        assert all(b <= a for a, b in zip(objectives, objectives[1:]))
        assert all(entry.step > 0 for entry in result.log)

    def test_stationary_start_needs_no_iterations(self):
        grid, params, obj = _coercive_setup()
        result = minimize_viscous(Trajectory.zeros(grid, 1), params, obj)
        assert result.converged
        assert result.iterations == 0
        assert result.log == []
        assert result.objective == 0.0

    def test_max_iters_zero(self):
        grid, params, obj = _coercive_setup()
        result = minimize_viscous(Trajectory.ramp(grid, 1.0), params, obj, OptimizeOptions(max_iters=0))
        assert not result.converged
        assert result.iterations == 0

    def test_epsilon_override(self):
        grid, params, obj = _coercive_setup()
        result = minimize_viscous(Trajectory.ramp(grid, 1.0), params.with_epsilon(0.0), obj,
                                  OptimizeOptions(epsilon=0.1, max_iters=3))
        assert result.forward.epsilon == 0.1

    def test_requires_viscosity(self):
        grid, params, obj = _coercive_setup()
        with pytest.raises(ValidationError, match="needs epsilon > 0"):
            minimize_viscous(Trajectory.zeros(grid, 1), params.with_epsilon(0.0), obj)

    def test_requires_zero_initial_control(self):
        grid, params, obj = _coercive_setup()
        with pytest.raises(ValidationError, match="zero_initial"):
            minimize_viscous(Trajectory.constant(grid, 1.0), params, obj)

    def test_line_search_failure(self):
        grid, params, _ = _coercive_setup()
        obj = ObjectiveSpec(q_d=[1.0])
        opts = OptimizeOptions(initial_step=1e6, max_halvings=1)
        with pytest.raises(LineSearchError, match="no Armijo step"):
            minimize_viscous(Trajectory.ramp(grid, 1.0), params, obj, opts)

    def test_line_search_error_is_solver_error(self):
        assert issubclass(LineSearchError, SolverError)

    def test_tracking_objective_reduction(self):
        """Test a tracking run removes at least 90% of the objective and ends strongly stationary."""
        grid, params, obj, ell0 = _tracking_setup()
        initial = evaluate_objective(ell0, params, obj)
        result = minimize_viscous(ell0, params, obj)
        assert result.converged
        assert result.objective <= 0.1 * initial
        report = check_viscous(result.ell, result.forward.q, result.adjoint.xi, result.adjoint.lam, params, obj)
        assert report.gradient_residual == pytest.approx(result.grad_norm, rel=1e-8, abs=1e-12)
        assert report.passed()
        assert report.classification == StationarityType.STRONG


class TestEvaluateObjective:
    """Test evaluate_objective."""

    def test_rate_independent_allowed(self):
        grid, params, obj, _ = _target_below_state_setup()
        # ell = 0.4t stays below kappa, q = 0: J = 0.5 * 0.01 + 0.5 * 0.16 * (1/3 + 1)
        expected = 0.005 + 0.08 * (4.0 / 3.0)
        assert evaluate_objective(Trajectory.ramp(grid, 0.4), params, obj) == pytest.approx(expected, rel=1e-4)


class TestVanishingViscositySweep:
    """Test vanishing_viscosity_sweep."""

    def test_target_below_state_limit_is_strong(self):
        grid, params, obj, ell0 = _target_below_state_setup()
        report = vanishing_viscosity_sweep([1e-1, 1e-2, 1e-3], params, obj, ell0)
        assert [row.epsilon for row in report.rows] == [1e-1, 1e-2, 1e-3]

        limit = report.limit_candidate
        np.testing.assert_allclose(limit.ell.values[:, 0], 0.1 * grid.nodes, atol=1e-5)
        assert np.all(report.reference_q.values == 0.0)
        np.testing.assert_allclose(limit.adjoint.xi.values, 0.1, atol=1e-12)

        limit_report = check_limit(limit.ell, report.reference_q, limit.adjoint.xi, limit.adjoint.lam,
                                   params, obj)
        assert limit_report.classification == StationarityType.STRONG
        assert limit_report.affine_checks

    def test_attained_target_limit_is_strong(self):
        grid, params, obj, ell0 = _attained_target_setup()
        report = vanishing_viscosity_sweep([1e-1, 1e-2, 1e-3], params, obj, ell0)
        limit = report.limit_candidate
        np.testing.assert_allclose(limit.ell.values[:, 0], 0.1 * grid.nodes, atol=1e-5)
        assert np.all(report.reference_q.values == 0.0)
        np.testing.assert_allclose(limit.adjoint.xi.values, 0.0, atol=1e-12)
        np.testing.assert_allclose(limit.adjoint.lam.values, 0.0, atol=1e-12)

        limit_report = check_limit(limit.ell, report.reference_q, limit.adjoint.xi, limit.adjoint.lam,
                                   params, obj)
        assert limit_report.affine_checks
        assert limit_report.attained_target_residual <= 1e-12
        assert limit_report.classification == StationarityType.STRONG

    def test_state_distance_shrinks_along_sweep(self):
        grid, params, obj, ell0 = _tracking_setup()
        report = vanishing_viscosity_sweep(DEFAULT_EPS_LIST, params, obj, ell0)
        distances = [row.q_distance_c0 for row in report.rows]
        assert all(b <= a + 1e-12 for a, b in zip(distances, distances[1:]))
        assert distances[-1] <= 1e-3
        assert distances[0] > distances[-1]

    def test_warm_start_bookkeeping(self):
        """Test each row starts no worse than where the previous row ended."""
        grid, params, obj, ell0 = _target_below_state_setup()
        report = vanishing_viscosity_sweep([1e-1, 1e-2, 1e-3], params, obj, ell0)
        for prev, row in zip(report.rows, report.rows[1:]):
            assert row.objective_init <= prev.objective + 1e-9
        assert report.rows[-1].ell_distance_h1 == 0.0
        assert report.rows[0].ell_distance_h1 > 0.0

    def test_biactive_limit_is_c_stationary(self):
        grid, params, obj, ell0 = _biactive_setup()
        report = vanishing_viscosity_sweep(DEFAULT_EPS_LIST, params, obj, ell0)
        limit = report.limit_candidate
        limit_report = check_limit(limit.ell, report.reference_q, limit.adjoint.xi, limit.adjoint.lam,
                                   params, obj)
        assert limit_report.classification == StationarityType.C
        assert limit_report.lxi_violation == 0.0

        xi_sup = [row.xi_sup for row in report.rows]
        proxy = [row.lambda_dual_proxy for row in report.rows]
        assert max(xi_sup) <= 10.0 * min(xi_sup)
        assert max(proxy) <= 10.0 * min(proxy)

        for row in report.rows:
            if row.converged:
                assert row.stationarity.classification == StationarityType.STRONG
                assert row.stationarity.passed()

    def test_cold_start_is_thread_count_independent(self):
        grid, params, obj, ell0 = _target_below_state_setup()
        eps = [1e-1, 1e-2]
        serial = vanishing_viscosity_sweep(eps, params, obj, ell0, warm_start=False, workers=1)
        threaded = vanishing_viscosity_sweep(eps, params, obj, ell0, warm_start=False, workers=2)
        assert [r.objective for r in serial.rows] == [r.objective for r in threaded.rows]
        assert [r.objective_init for r in serial.rows] == [r.objective_init for r in threaded.rows]

    @pytest.mark.parametrize("eps_list", [[], [1e-2, 1e-1], [1e-1, 1e-1], [1e-1, -1e-2]])
    def test_invalid_eps_list(self, eps_list):
        grid, params, obj, ell0 = _target_below_state_setup()
        with pytest.raises(ValidationError, match="eps_list"):
            vanishing_viscosity_sweep(eps_list, params, obj, ell0)
