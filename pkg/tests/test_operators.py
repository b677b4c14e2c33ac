"""
Test cases for the history operator, stored energy and driving force.
"""

import numpy as np
import pytest

from rioc.model.degradation import AffineDegradation, ConstantDegradation
from rioc.model.grid import TimeGrid, Trajectory
from rioc.model.operators import history, history_values, step_drive_values, stored_energy, z_field
from rioc.model.params import ModelParams


class TestHistory:
    """Test the history operator H."""

    def test_constant_rate(self):
        """Test H of a constant is a ramp from y0."""
        grid = TimeGrid(T=2.0, N=20)
        H = history(Trajectory.constant(grid, 1.0), [0.5])
        np.testing.assert_allclose(H.values[:, 0], 0.5 + grid.nodes, atol=1e-14)

    def test_trapezoid_of_ramp(self):
        """Test the trapezoid rule is exact for linear q."""
        grid = TimeGrid(T=1.0, N=10)
        H = history(Trajectory.ramp(grid, 1.0), [0.0])
        np.testing.assert_allclose(H.values[:, 0], 0.5 * grid.nodes ** 2, atol=1e-14)

    def test_nondecreasing_for_nonnegative_q(self):
        grid = TimeGrid(T=1.0, N=50)
        q = Trajectory.from_function(grid, lambda t: np.abs(np.sin(7 * t)))
        H = history(q, [0.0])
        assert np.all(np.diff(H.values[:, 0]) >= 0.0)

    def test_affine_in_q(self):
        """Test H(a q1 + b q2) = a H(q1) + b H(q2) - (a + b - 1) y0."""
        grid = TimeGrid(T=1.5, N=60)
        y0 = np.array([0.3, -0.2])
        q1 = Trajectory.from_function(grid, lambda t: np.column_stack([np.sin(3 * t), t ** 2]))
        q2 = Trajectory.from_function(grid, lambda t: np.column_stack([np.exp(-t), np.cos(t)]))
        a, b = 2.5, -0.7
        combined = history(a * q1 + b * q2, y0).values
        expected = a * history(q1, y0).values + b * history(q2, y0).values - (a + b - 1.0) * y0
        np.testing.assert_allclose(combined, expected, atol=1e-12)

    def test_values_helper(self):
        q = np.array([[0.0], [1.0], [3.0]])
        np.testing.assert_allclose(history_values(q, np.array([1.0]), 0.5), [[1.0], [1.25], [2.25]])

    def test_dimension_mismatch(self):
        grid = TimeGrid(T=1.0, N=4)
        with pytest.raises(ValueError, match="dimension"):
            history(Trajectory.zeros(grid, 2), [0.0])

    def test_rejects_interval_samples(self):
        grid = TimeGrid(T=1.0, N=4)
        with pytest.raises(ValueError, match="node samples"):
            history(Trajectory.zeros(grid, 1, per_interval=True), [0.0])


class TestStoredEnergy:
    """Test stored_energy."""

    def test_value(self):
        params = ModelParams(alpha=2.0, y0=[0.0])
        assert stored_energy(0, [1.0], [2.0], params) == pytest.approx(-1.0)

    def test_vector_value(self):
        params = ModelParams(alpha=1.0, y0=[0.0, 0.0])
        # 0.5 * (1 + 4) - (1 * 1 + 2 * 0)
        assert stored_energy(3, [1.0, 2.0], [1.0, 0.0], params) == pytest.approx(1.5)

    def test_mismatch(self):
        params = ModelParams(alpha=1.0, y0=[0.0])
        with pytest.raises(ValueError, match="dimension mismatch at node 4"):
            stored_energy(4, [1.0, 2.0], [1.0, 2.0], params)


class TestDrivingForce:
    """Test z_field and the lagged step drive."""

    def test_zero_state(self):
        grid = TimeGrid(T=1.0, N=10)
        params = ModelParams(alpha=1.0, y0=[0.0], kappa=ConstantDegradation(value=0.5))
        z = z_field(Trajectory.zeros(grid, 1), Trajectory.constant(grid, 2.0), params)
        np.testing.assert_allclose(z.values, 1.5)

    def test_history_enters(self):
        grid = TimeGrid(T=1.0, N=10)
        params = ModelParams(alpha=1.0, y0=[0.0], kappa=AffineDegradation(a=0.0, b=1.0))
        q = Trajectory.constant(grid, 1.0)
        z = z_field(q, Trajectory.zeros(grid, 1), params)
        # -q - H = -1 - t
        np.testing.assert_allclose(z.values[:, 0], -1.0 - grid.nodes, atol=1e-14)

    def test_step_drive_lags_history(self):
        q = np.array([[0.0], [1.0], [2.0]])
        ell = np.array([[0.0], [3.0], [5.0]])
        H = np.array([[10.0], [20.0], [30.0]])
        drive = step_drive_values(q, ell, H, 1.0, AffineDegradation(a=0.0, b=0.1))
        # -q_{k+1} + ell_{k+1} - 0.1 H_k
        np.testing.assert_allclose(drive, [[1.0], [1.0]])

    def test_grid_mismatch(self):
        params = ModelParams(alpha=1.0, y0=[0.0])
        with pytest.raises(ValueError, match="grid mismatch"):
            z_field(Trajectory.zeros(TimeGrid(T=1.0, N=4), 1), Trajectory.zeros(TimeGrid(T=1.0, N=5), 1), params)
