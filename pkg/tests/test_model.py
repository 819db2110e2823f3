"""Kernel and forcing types: evaluation, transforms, norm bookkeeping."""

import numpy as np
import pytest

from volspec.model import (
    ConstantForcing,
    DecayingForcing,
    FiniteKernel,
    GeometricKernel,
    HarmonicForcing,
    PoleError,
    TabulatedForcing,
    TabulatedKernel,
    VolterraSystem,
    ZeroForcing,
    contraction_check,
    kernel_eval,
    kernel_norm_sum,
    seq_norms,
)


def direct_zt(kernel, z, terms=4000):
    B = kernel.eval_range(terms)
    powers = np.asarray(z, dtype=np.complex128) ** -np.arange(terms)
    return np.einsum("n,nik->ik", powers, B)


class TestFiniteKernel:
    def test_eval_past_range_is_zero(self):
        k = FiniteKernel(np.array([1.0, 2.0]))
        assert k.eval(0)[0, 0] == 1.0
        assert k.eval(5)[0, 0] == 0.0

    def test_zt_matches_direct_sum(self):
        k = FiniteKernel(np.array([0.2, 0.1, -0.05]))
        z = 1.3 * np.exp(0.7j)
        val, bound = k.zt(z)
        assert bound == 0.0
        np.testing.assert_allclose(val, direct_zt(k, z, 3), rtol=1e-14)

    def test_zt_pole_at_zero(self):
        k = FiniteKernel(np.array([0.2, 0.1]))
        with pytest.raises(PoleError):
            k.zt(0.0)

    def test_empty_kernel_needs_dim(self):
        with pytest.raises(ValueError):
            FiniteKernel(np.zeros((0,)))
        k = FiniteKernel(np.zeros((0,)), dim=2)
        assert k.norm_sum() == 0.0
        assert k.zt(2.0)[0].shape == (2, 2)

    def test_rational_form_agrees(self):
        rng = np.random.default_rng(0)
        terms = rng.standard_normal((4, 2, 2)) + 1j * rng.standard_normal((4, 2, 2))
        k = FiniteKernel(terms)
        num, den = k.rational_zt()
        z = 1.7 - 0.4j
        numval = sum(num[p] * z**p for p in range(num.shape[0]))
        denval = sum(den[p] * z**p for p in range(den.shape[0]))
        np.testing.assert_allclose(numval / denval, k.zt(z)[0], rtol=1e-13)


class TestGeometricKernel:
    def test_eval_closed_form(self):
        k = GeometricKernel(np.array([0.25]), np.array([0.5]))
        assert k.eval(3)[0, 0] == pytest.approx(0.25 * 0.5**3)

    def test_zt_closed_form_matches_series(self):
        k = GeometricKernel(
            np.array([[[0.2, 0.05], [0.0, 0.1]]]), np.array([0.6 * np.exp(1j)])
        )
        z = 1.4 * np.exp(0.3j)
        val, bound = k.zt(z)
        assert bound == 0.0
        np.testing.assert_allclose(val, direct_zt(k, z), rtol=1e-12)

    def test_known_values(self):
        # sum 0.25 (0.5/z)^n z-transform: 0.25 z / (z - 0.5)
        k = GeometricKernel(np.array([0.25]), np.array([0.5]))
        assert k.zt(2.0)[0][0, 0] == pytest.approx(1.0 / 3.0)
        assert k.zt(1.0)[0][0, 0] == pytest.approx(0.5)

    def test_pole_guard(self):
        k = GeometricKernel(np.array([0.25]), np.array([0.5]))
        with pytest.raises(PoleError):
            k.zt(0.5)

    def test_ratio_inside_disk_enforced(self):
        with pytest.raises(ValueError):
            GeometricKernel(np.array([0.25]), np.array([1.0]))

    def test_norm_sum(self):
        k = GeometricKernel(np.array([0.25]), np.array([0.5]))
        assert k.norm_sum() == pytest.approx(0.5)

    def test_rational_form_agrees(self):
        k = GeometricKernel(
            np.array([0.3, -0.1 + 0.2j]), np.array([0.5, -0.3j])
        )
        num, den = k.rational_zt()
        for z in (2.0, 1.1 * np.exp(2.2j)):
            numval = sum(num[p] * z**p for p in range(num.shape[0]))
            denval = sum(den[p] * z**p for p in range(den.shape[0]))
            np.testing.assert_allclose(numval / denval, k.zt(z)[0], rtol=1e-12)

    def test_zt_many_matches_scalar_calls(self):
        k = GeometricKernel(np.array([0.3, 0.1]), np.array([0.5, -0.4]))
        zs = 1.5 * np.exp(1j * np.linspace(0, 2, 5))
        many, _ = k.zt_many(zs)
        for i, z in enumerate(zs):
            np.testing.assert_allclose(many[i], k.zt(z)[0], rtol=1e-13)


class TestTabulatedKernel:
    def make(self):
        n = np.arange(30)
        vals = (0.3 * 0.5**n).reshape(-1, 1, 1)
        tail = 0.3 * 0.5**30 / 0.5
        return TabulatedKernel(vals, tail_norm_bound=tail)

    def test_zt_truncation_bound_is_honest(self):
        k = self.make()
        z = 1.5 * np.exp(0.4j)
        val, bound = k.zt(z)
        exact = 0.3 * z / (z - 0.5)  # the sequence it tabulates
        assert abs(val[0, 0] - exact) <= bound

    def test_inside_disk_rejected(self):
        k = self.make()
        with pytest.raises(ValueError):
            k.zt(0.9)

    def test_circle_points_accepted(self):
        # |exp(i theta)| can round to just below 1; must still be accepted
        k = self.make()
        zs = np.exp(1j * np.linspace(0.0, 2 * np.pi, 64, endpoint=False))
        assert float(np.min(np.abs(zs))) <= 1.0
        k.zt_many(zs)

    def test_norm_sum_includes_tail(self):
        k = self.make()
        assert k.norm_sum() == pytest.approx(0.3 / 0.5, rel=1e-12)

    def test_strict_eval_refuses_extrapolation(self):
        k = self.make()
        assert kernel_eval(k, 29)[0, 0] != 0.0
        with pytest.raises(ValueError):
            kernel_eval(k, 30, strict=True)
        assert kernel_eval(k, 30)[0, 0] == 0.0


class TestForcings:
    def test_zero(self):
        f = ZeroForcing(2)
        assert f.eval_range(5).shape == (5, 2)
        assert f.amplitude_bound() == 0.0

    def test_constant(self):
        f = ConstantForcing([1.0, -2.0])
        np.testing.assert_array_equal(f.eval(7), [1.0, -2.0])
        assert f.amplitude_bound() == pytest.approx(np.sqrt(5.0))

    def test_harmonic_matches_definition(self):
        f = HarmonicForcing(np.array([0.7, 2.1]), np.array([[1.0, 0.0], [0.0, 2.0]]))
        n = 13
        expected = np.exp(1j * n * 0.7) * np.array([1, 0]) + np.exp(
            1j * n * 2.1
        ) * np.array([0, 2])
        np.testing.assert_allclose(f.eval(n), expected)
        np.testing.assert_allclose(f.eval_range(20)[n], expected)

    def test_decaying_kinds(self):
        g = DecayingForcing([1.0], ratio=0.5)
        assert g.eval(3)[0] == pytest.approx(0.125)
        h = DecayingForcing([2.0], kind="inverse-n")
        assert h.eval(3)[0] == pytest.approx(0.5)
        with pytest.raises(ValueError):
            DecayingForcing([1.0], ratio=1.5)
        with pytest.raises(ValueError):
            DecayingForcing([1.0], kind="nope")

    def test_tabulated_zero_extension(self):
        f = TabulatedForcing(np.array([1.0, 2.0]))
        assert f.eval(1)[0] == 2.0
        assert f.eval(2)[0] == 0.0
        assert f.eval_range(4)[3, 0] == 0.0


class TestSystem:
    def test_dim_mismatch_rejected(self):
        k = FiniteKernel(np.zeros((1, 2, 2)))
        with pytest.raises(ValueError):
            VolterraSystem(np.array([[0.5]]), k)

    def test_contraction_check(self):
        k = GeometricKernel(np.array([0.25]), np.array([0.5]))
        ok, slack = contraction_check(VolterraSystem(np.array([[0.5]]), k))
        assert ok and slack == pytest.approx(0.0, abs=1e-15)
        k2 = GeometricKernel(np.array([0.125]), np.array([0.5]))
        ok2, slack2 = contraction_check(VolterraSystem(np.array([[0.5]]), k2))
        assert ok2 and slack2 == pytest.approx(0.25)

    def test_kernel_norm_sum_dispatch(self):
        k = FiniteKernel(np.array([0.2, -0.1]))
        assert kernel_norm_sum(k) == pytest.approx(0.3)

    def test_seq_norms_shapes(self):
        assert seq_norms(np.ones((5, 2))).shape == (5,)
        assert seq_norms(np.ones((5, 2, 2))).shape == (5,)
        with pytest.raises(ValueError):
            seq_norms(np.ones(5))
