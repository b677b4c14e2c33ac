"""
Test cases for degradation functions and their registry.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from rioc.model.degradation import (
    DEGRADATION_REGISTRY,
    AffineDegradation,
    ConstantDegradation,
    DegradationFunction,
    DegradationKind,
    SaturatingDegradation,
)


class TestDegradationKind:
    """Test DegradationKind enum."""

    def test_kind_values(self):
        assert DegradationKind.CONSTANT == "constant"
        assert DegradationKind.AFFINE == "affine"
        assert DegradationKind.SATURATING == "saturating"

    def test_kind_str(self):
        assert str(DegradationKind.SATURATING) == "saturating"

    def test_registry_complete(self):
        """Test every builtin kind is registered."""
        assert DEGRADATION_REGISTRY[DegradationKind.CONSTANT] is ConstantDegradation
        assert DEGRADATION_REGISTRY[DegradationKind.AFFINE] is AffineDegradation
        assert DEGRADATION_REGISTRY[DegradationKind.SATURATING] is SaturatingDegradation


class TestConstantDegradation:
    """Test ConstantDegradation."""

    def test_eval_keeps_shape(self):
        kappa = ConstantDegradation(value=0.5)
        out = kappa.eval(np.zeros((3, 2)))
        assert out.shape == (3, 2)
        assert np.all(out == 0.5)
        assert kappa(1.0) == 0.5

    def test_derivatives_vanish(self):
        kappa = ConstantDegradation(value=0.5)
        assert np.all(kappa.deriv(np.linspace(0, 1, 5)) == 0.0)
        assert np.all(kappa.deriv2(np.linspace(0, 1, 5)) == 0.0)
        assert kappa.lipschitz_const == 0.0
        assert kappa.is_affine

    def test_negative_value_rejected(self):
        with pytest.raises(ValidationError):
            ConstantDegradation(value=-0.1)

    def test_frozen(self):
        kappa = ConstantDegradation(value=0.5)
        with pytest.raises(ValidationError):
            kappa.value = 1.0


class TestAffineDegradation:
    """Test AffineDegradation."""

    def test_eval_and_deriv(self):
        kappa = AffineDegradation(a=0.3, b=0.2)
        np.testing.assert_allclose(kappa.eval(np.array([0.0, 1.0, 2.0])), [0.3, 0.5, 0.7])
        np.testing.assert_allclose(kappa.deriv(np.array([0.0, 5.0])), [0.2, 0.2])
        assert kappa.lipschitz_const == 0.2
        assert kappa.is_affine


class TestSaturatingDegradation:
    """Test SaturatingDegradation."""

    def test_value_at_zero(self):
        kappa = SaturatingDegradation(base=0.5, lipschitz=0.2, scale=1.0)
        assert float(kappa.eval(0.0)) == pytest.approx(0.5)
        assert float(kappa.deriv(0.0)) == pytest.approx(-0.2)
        assert not kappa.is_affine

    def test_bounded_and_nonnegative(self):
        kappa = SaturatingDegradation(base=0.5, lipschitz=0.2, scale=2.0)
        x = np.linspace(0.0, 100.0, 101)
        values = kappa.eval(x)
        assert np.all(values >= 0.0)
        assert values[-1] == pytest.approx(0.5 - 0.4, abs=1e-12)

    def test_hardening_sign(self):
        kappa = SaturatingDegradation(base=0.5, lipschitz=0.2, softening=False)
        assert float(kappa.deriv(0.0)) == pytest.approx(0.2)
        assert kappa.eval(10.0) > 0.5

    def test_derivatives_match_finite_differences(self):
        kappa = SaturatingDegradation(base=1.0, lipschitz=0.3, scale=0.7)
        x = np.linspace(-1.0, 2.0, 7)
        h = 1e-6
        fd1 = (kappa.eval(x + h) - kappa.eval(x - h)) / (2 * h)
        fd2 = (kappa.deriv(x + h) - kappa.deriv(x - h)) / (2 * h)
        np.testing.assert_allclose(kappa.deriv(x), fd1, atol=1e-8)
        np.testing.assert_allclose(kappa.deriv2(x), fd2, atol=1e-6)

    def test_lipschitz_bound(self):
        kappa = SaturatingDegradation(base=1.0, lipschitz=0.3, scale=0.7)
        assert kappa.lipschitz_const == 0.3
        assert np.max(np.abs(kappa.deriv(np.linspace(-5, 5, 201)))) <= 0.3 + 1e-15

    def test_base_too_small(self):
        with pytest.raises(ValidationError, match="keep kappa nonnegative"):
            SaturatingDegradation(base=0.1, lipschitz=0.2, scale=1.0)


class TestDegradationSerialization:
    """Test dict round trips through the registry."""

    def test_to_dict(self):
        assert AffineDegradation(a=0.3, b=0.2).to_dict() == {"kind": "affine", "a": 0.3, "b": 0.2}

    def test_model_dump_uses_to_dict(self):
        kappa = ConstantDegradation(value=0.5)
        assert kappa.model_dump() == {"kind": "constant", "value": 0.5}

    @pytest.mark.parametrize("kappa", [
        ConstantDegradation(value=0.5),
        AffineDegradation(a=0.3, b=0.2),
        SaturatingDegradation(base=0.5, lipschitz=0.2, scale=1.5, softening=False),
    ])
    def test_round_trip(self, kappa):
        restored = DegradationFunction.from_dict(kappa.to_dict())
        assert type(restored) is type(kappa)
        assert restored == kappa

    def test_missing_kind(self):
        with pytest.raises(ValueError, match="needs a 'kind'"):
            DegradationFunction.from_dict({"value": 0.5})

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            DegradationFunction.from_dict({"kind": "exponential", "rate": 1.0})
