"""Quotient norms, shift resolvents, Abel limits, spectrum estimates."""

import numpy as np
import pytest

from volspec.seqspec import (
    abel_test,
    check_inclusion,
    estimate_spectrum,
    estimate_z_spectrum,
    quotient_norm,
    resolvent_S,
)


class TestQuotientNorm:
    def test_inverse_n_window_value(self):
        x = 1.0 / np.arange(1, 4001)
        q = quotient_norm(x, 999, 1999)
        assert q.value == pytest.approx(1e-3)  # attained at the window start

    def test_default_window(self):
        x = np.ones(4000)
        q = quotient_norm(x)
        assert (q.window_start, q.window_end) == (1000, 1999)
        assert q.value == 1.0

    def test_window_validation(self):
        with pytest.raises(ValueError):
            quotient_norm(np.ones(10), 5, 20)


class TestResolventS:
    def test_geometric_tail_closed_form(self):
        # x(n) = xi^n: R(lam, S)x(k) = xi^k / (lam - xi), up to truncation
        xi = np.exp(0.7j)
        lam = 1.3 * np.exp(0.2j)
        x = xi ** np.arange(3000)
        tail = resolvent_S(x, lam, sup_bound=1.0)
        k = np.arange(500)
        exact = xi**k / (lam - xi)
        err = np.abs(tail.values[:500] - exact)
        # slack: ~L rounding steps on top of the declared tail truncation
        assert np.all(err <= tail.truncation_bound(k) + 3000 * 1e-15)

    def test_requires_outside_circle(self):
        with pytest.raises(ValueError):
            resolvent_S(np.ones(10), 1.0)

    def test_operator_shaped_data(self):
        x = np.tile(np.eye(2), (100, 1, 1)) * 0.5 ** np.arange(100)[:, None, None]
        tail = resolvent_S(x, 2.0)
        assert tail.values.shape == (100, 2, 2)

    def test_quotient_bound_random(self):
        # ||R(lam,S)x|| <= ||x|| / (|lam|-1) + truncation, windows matched
        rng = np.random.default_rng(31)
        x = rng.standard_normal((4000, 2)) + 1j * rng.standard_normal((4000, 2))
        for _ in range(10):
            lam = rng.uniform(1.05, 2.0) * np.exp(2j * np.pi * rng.random())
            tail = resolvent_S(x, lam)
            lhs = quotient_norm(tail.values)
            rhs = quotient_norm(x, 1000, 3999).value / (abs(lam) - 1.0)
            assert lhs.value <= rhs + float(tail.truncation_bound(lhs.window_end)) + 1e-12


class TestAbel:
    def test_constant_has_mass_at_zero(self):
        x = np.ones(40000)
        res = abel_test(x, 0.0)
        assert not res.passed
        assert res.limit == pytest.approx(1.0, rel=1e-2)

    def test_constant_clean_away_from_zero(self):
        x = np.ones(40000)
        assert abel_test(x, np.pi).passed

    def test_alternating_mass_at_pi(self):
        x = (-1.0) ** np.arange(40000)
        assert not abel_test(x, np.pi).passed
        assert abel_test(x, 0.0).passed

    def test_vanishing_sequence_passes_everywhere(self):
        x = 1.0 / np.arange(1, 40001)
        for th in (0.0, 1.0, np.pi):
            assert abel_test(x, th).passed


class TestSpectrumEstimate:
    def test_pure_tone_detected_off_grid(self):
        theta0 = 1.0  # not on any coarse grid
        x = np.exp(1j * theta0 * np.arange(20000))
        est = estimate_spectrum(x, angle_grid=32)
        assert len(est.detected) == 1
        assert abs(est.detected[0] - theta0) < 1e-4

    def test_vanishing_sequence_detects_nothing(self):
        # decay scale (33 steps) far below the late window, so no direction
        # can keep its resolvent quotient growing
        x = 0.97 ** np.arange(20000)
        est = estimate_spectrum(x, angle_grid=16)
        assert est.detected == []

    def test_shift_invariance(self):
        x = np.exp(1j * 2.2 * np.arange(20000))
        a = estimate_spectrum(x, angle_grid=16).detected
        b = estimate_spectrum(x[7:], angle_grid=16).detected
        assert len(a) == len(b) == 1
        assert abs(a[0] - b[0]) < 1e-4

    def test_matrix_image_spectrum_included(self):
        # componentwise mixing cannot create new frequencies
        x = np.stack(
            [np.exp(1j * 0.9 * np.arange(20000)), np.exp(1j * 2.5 * np.arange(20000))],
            axis=1,
        )
        M = np.array([[1.0, 2.0], [0.5, -1.0]])
        est_mx = estimate_spectrum(x @ M.T, angle_grid=32)
        ok, _, dist = check_inclusion(est_mx, [0.9, 2.5], 1e-3)
        assert ok, dist

    def test_two_tones(self):
        n = np.arange(30000)
        x = np.exp(1j * 0.5 * n) + 0.7 * np.exp(1j * 2.9 * n)
        est = estimate_spectrum(x, angle_grid=32)
        ok, _, dist = check_inclusion(est, [0.5, 2.9], 1e-3)
        assert ok and len(est.detected) == 2


class TestZSpectrum:
    def test_inverse_n_flagged_at_zero(self):
        x = 1.0 / np.arange(1, 200001)
        est = estimate_z_spectrum(x, angle_grid=32)
        assert any(abs(th) < 1e-9 for th in est.detected)
        assert est.profile[0] >= 6.0  # ~ ln(1/(s-1)) at s-1 = 1e-3

    def test_tone_flagged_at_its_angle(self):
        grid_angle = 2 * np.pi * 8 / 32
        x = np.exp(1j * grid_angle * np.arange(100000))
        est = estimate_z_spectrum(x, angle_grid=32)
        assert any(abs(th - grid_angle) < 1e-9 for th in est.detected)

    def test_rejects_operator_data(self):
        with pytest.raises(ValueError):
            estimate_z_spectrum(np.zeros((100, 2, 2)))

    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            estimate_z_spectrum(np.ones(100), s_schedule=[2.0, 0.9])


class TestInclusion:
    def test_wraparound_distance(self):
        ok, _, dist = check_inclusion([2 * np.pi - 0.001], [0.0], 1e-2)
        assert ok and dist == pytest.approx(0.001)

    def test_empty_inner_always_ok(self):
        ok, worst, dist = check_inclusion([], [1.0], 1e-8)
        assert ok and worst is None and dist == 0.0

    def test_violation_reported(self):
        ok, worst, dist = check_inclusion([1.0, 2.0], [1.0], 1e-2)
        assert not ok and worst == 2.0 and dist == pytest.approx(1.0)
