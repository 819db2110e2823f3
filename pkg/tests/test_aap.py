"""Decay tests, Bohr coefficients, almost-periodic decomposition."""

import numpy as np
import pytest

from volspec.aap import (
    aap_decompose,
    bohr_coefficient,
    c0_test,
    detect_frequencies,
    kt_difference_test,
)
from volspec.gallery import kt_system
from volspec.solver import resolvent


class TestC0:
    def test_geometric_decay_passes(self):
        assert c0_test(0.99 ** np.arange(2000)).passed

    def test_constant_fails(self):
        assert not c0_test(np.ones(2000)).passed

    def test_exact_zero_passes(self):
        assert c0_test(np.zeros(100)).passed

    def test_slow_decay_needs_room(self):
        x = 1.0 / np.arange(1, 20002)
        assert not c0_test(x, tol=1e-6).passed  # tail still above tol
        assert c0_test(x, tol=1e-3).passed

    def test_too_short(self):
        with pytest.raises(ValueError):
            c0_test(np.ones(3))


def test_kt_difference_on_resolvent():
    X = resolvent(kt_system(), 2000)
    assert kt_difference_test(X).passed
    assert not c0_test(X.values, tol=1e-6).passed  # X itself tends to 2/3


class TestBohr:
    def test_exact_tone(self):
        theta = 1.3
        x = (2.0 - 1.0j) * np.exp(1j * theta * np.arange(5000))
        c = bohr_coefficient(x, theta)
        assert c == pytest.approx(2.0 - 1.0j, abs=1e-12)

    def test_cross_term_averages_out(self):
        x = np.exp(1j * 1.3 * np.arange(5000))
        assert abs(bohr_coefficient(x, 2.6)) < 1e-3

    def test_vector_data(self):
        x = np.stack([np.ones(1000), np.zeros(1000)], axis=1)
        c = bohr_coefficient(x, 0.0)
        np.testing.assert_allclose(c, [1.0, 0.0])


class TestDetect:
    def test_two_tones_with_decaying_clutter(self):
        n = np.arange(8000)
        x = np.exp(1j * 0.8 * n) + 0.6 * np.exp(1j * 2.4 * n) + 0.9**n
        freqs = detect_frequencies(x)
        assert len(freqs) == 2
        assert min(abs(f - 0.8) for f in freqs) < 1e-3
        assert min(abs(f - 2.4) for f in freqs) < 1e-3

    def test_nothing_in_vanishing_data(self):
        assert detect_frequencies(0.95 ** np.arange(4000)) == []


class TestDecompose:
    def test_tone_plus_decay(self):
        n = np.arange(4000)
        v = np.array([1.0, -0.5j])
        x = np.exp(1j * n)[:, None] * v + (0.6**n)[:, None] * np.array([1.0, 1.0])
        dec = aap_decompose(x)
        assert dec.is_aap
        assert len(dec.frequencies) == 1
        assert abs(dec.frequencies[0] - 1.0) < 1e-6
        np.testing.assert_allclose(dec.coefficients[0], v, atol=1e-6)

    def test_alternating_plus_drift(self):
        n = np.arange(6000)
        x = (-1.0) ** n + 1.0 / (n + 1.0)
        dec = aap_decompose(x)
        assert dec.is_aap
        assert min(abs(f - np.pi) for f in dec.frequencies) < 1e-6

    def test_constant_is_frequency_zero(self):
        dec = aap_decompose(np.full(4000, 2.5))
        assert dec.is_aap and dec.frequencies == pytest.approx([0.0], abs=1e-9)
        assert dec.coefficients[0, 0] == pytest.approx(2.5, rel=1e-6)

    def test_non_periodic_envelope_rejected(self):
        n = np.arange(8000)
        x = np.cos(0.5 * np.sqrt(n))  # wanders too slowly to be almost periodic
        assert not aap_decompose(x).is_aap

    def test_supplied_duplicate_frequencies_rejected(self):
        x = np.ones(100)
        with pytest.raises(ValueError):
            aap_decompose(x, candidate_frequencies=[0.0, 1e-9])

    def test_close_tones_resolved_by_refinement(self):
        n = np.arange(60000)
        x = np.exp(1j * 1.00 * n) + np.exp(1j * 1.02 * n)
        dec = aap_decompose(x)
        got = sorted(dec.frequencies)
        assert len(got) == 2
        assert abs(got[0] - 1.00) < 1e-3 and abs(got[1] - 1.02) < 1e-3
