"""Transform evaluation with truncation bounds, and the calculus rules."""

import numpy as np
import pytest

from volspec.model import FiniteKernel, GeometricKernel, TabulatedKernel
from volspec.ztransform import (
    convolution_rule_check,
    initial_value_check,
    shift_rule_check,
    zt_kernel,
    zt_sequence,
)


class TestZtSequence:
    def test_geometric_closed_form_within_bound(self):
        # sum a^n z^-n = z / (z - a)
        a = 0.6 * np.exp(0.9j)
        x = a ** np.arange(80)
        for z in (1.5, 2.0 * np.exp(1.3j)):
            fx = zt_sequence(x, z, sup_bound=1.0)
            exact = z / (z - a)
            assert abs(fx.value[0] - exact) <= fx.truncation_error_bound + 1e-14

    def test_bound_shrinks_with_window(self):
        x = np.ones(200)
        b_short = zt_sequence(x[:50], 1.5, sup_bound=1.0).truncation_error_bound
        b_long = zt_sequence(x, 1.5, sup_bound=1.0).truncation_error_bound
        assert b_long < b_short * 1e-20

    def test_domain_is_strictly_outside_circle(self):
        x = np.ones(10)
        with pytest.raises(ValueError):
            zt_sequence(x, 1.0)
        with pytest.raises(ValueError):
            zt_sequence(x, 0.5)

    def test_holomorphy_surrogate(self):
        # d/dz-bar of the partial sum should vanish: central differences in
        # the two real directions satisfy the Cauchy-Riemann system
        x = (0.7 ** np.arange(60)) * np.exp(1j * np.arange(60))
        z0, h = 1.4 + 0.6j, 1e-4

        def f(z):
            return zt_sequence(x, z).value[0]

        du = (f(z0 + h) - f(z0 - h)) / (2 * h)
        dv = (f(z0 + 1j * h) - f(z0 - 1j * h)) / (2 * h)
        assert abs(du + 1j * dv) < 1e-6  # = 2 |df/dz-bar|

    def test_vector_window(self):
        x = np.stack([np.ones(30), 0.5 ** np.arange(30)], axis=1)
        fx = zt_sequence(x, 2.0)
        assert fx.value.shape == (2,)
        assert fx.value[0] == pytest.approx(2.0, abs=1e-8)


class TestKernelTransforms:
    def test_finite_polynomial(self):
        k = FiniteKernel(np.array([0.5, 0.25]))
        fk = zt_kernel(k, 2.0)
        assert fk.value[0, 0] == pytest.approx(0.5 + 0.125)
        assert fk.truncation_error_bound == 0.0

    def test_geometric_domain(self):
        k = GeometricKernel(np.array([0.25]), np.array([0.5]))
        assert zt_kernel(k, 2.0).value[0, 0] == pytest.approx(1.0 / 3.0)
        assert zt_kernel(k, 1.0).value[0, 0] == pytest.approx(0.5)
        with pytest.raises(ValueError):
            zt_kernel(k, 0.4)

    def test_tabulated_two_paths_agree(self):
        # a geometric kernel and its tabulation agree within the tail bound
        geo = GeometricKernel(np.array([0.3]), np.array([0.5]))
        n = np.arange(40)
        tab = TabulatedKernel(
            (0.3 * 0.5**n).reshape(-1, 1, 1), tail_norm_bound=0.3 * 0.5**40 / 0.5
        )
        for z in (1.2 * np.exp(0.5j), 3.0):
            a = zt_kernel(geo, z)
            b = zt_kernel(tab, z)
            # tail bound plus arithmetic roundoff between the two paths
            assert abs(a.value[0, 0] - b.value[0, 0]) <= b.truncation_error_bound + 1e-15


def random_window(rng, d, L):
    return rng.standard_normal((L, d)) + 1j * rng.standard_normal((L, d))


class TestRules:
    def test_shift_rule_random(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            x = random_window(rng, int(rng.integers(1, 3)), int(rng.integers(8, 129)))
            z = rng.uniform(1.1, 3.0) * np.exp(2j * np.pi * rng.random())
            res = shift_rule_check(x, z)
            assert res.passed, (res.residual, res.allowance)

    def test_convolution_rule_each_kernel(self):
        rng = np.random.default_rng(22)
        x = random_window(rng, 2, 100)
        kernels = [
            FiniteKernel(0.3 * rng.standard_normal((3, 2, 2))),
            GeometricKernel(0.3 * rng.standard_normal((1, 2, 2)), np.array([0.5])),
            TabulatedKernel(
                0.2 * rng.standard_normal((20, 2, 2)), tail_norm_bound=0.01
            ),
        ]
        for kernel in kernels:
            for _ in range(5):
                z = rng.uniform(1.1, 3.0) * np.exp(2j * np.pi * rng.random())
                res = convolution_rule_check(kernel, x, z)
                assert res.passed, (type(kernel).__name__, res.residual, res.allowance)

    def test_convolution_dim_mismatch(self):
        k = FiniteKernel(np.array([0.5]))
        with pytest.raises(ValueError):
            convolution_rule_check(k, np.ones((10, 2)), 2.0)

    def test_initial_value_gaps_track_envelope(self):
        rng = np.random.default_rng(23)
        x = random_window(rng, 2, 64)
        res = initial_value_check(x)
        assert res.monotone and res.passed
        assert len(res.gaps) == 3

    def test_initial_value_recovers_x0_for_geometric(self):
        x = 0.5 ** np.arange(50)
        res = initial_value_check(x, schedule=(10.0, 100.0, 1e6))
        assert res.gaps[-1] == pytest.approx(0.0, abs=1e-5)
