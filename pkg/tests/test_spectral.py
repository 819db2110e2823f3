"""Characteristic operator, singular set detection, classification."""

import warnings

import numpy as np
import pytest

import volspec.spectral as spectral
from volspec.gallery import cor3_system, gallery, kt_system
from volspec.model import FiniteKernel, GeometricKernel, VolterraSystem
from volspec.spectral import (
    SingularPoint,
    SingularSet,
    boundedness_profile,
    classify,
    delta,
    find_sigma,
    scan_circle,
)


class TestDelta:
    def test_scalar_value(self):
        # z - a - b z/(z - r) at z=2: 2 - 1/2 - 1/3 = 7/6
        assert delta(kt_system(), 2.0)[0, 0] == pytest.approx(7.0 / 6.0)

    def test_vanishes_at_unit_root(self):
        assert abs(delta(kt_system(), 1.0)[0, 0]) < 1e-15


class TestFindSigma:
    def test_unit_root_instance(self):
        sigma = find_sigma(kt_system())
        assert len(sigma.points) == 1
        assert abs(sigma.points[0].angle) < 1e-10
        assert sigma.points[0].residual < 1e-10

    def test_empty_instance_both_paths(self):
        system = cor3_system()
        assert find_sigma(system, method="poly").is_empty
        assert find_sigma(system, method="scan").is_empty

    def test_paths_agree_on_unit_root(self):
        a = find_sigma(kt_system(), method="poly").angles()
        b = find_sigma(kt_system(), method="scan").angles()
        assert len(a) == len(b) == 1
        assert abs(a[0] - b[0]) < 1e-6

    def test_pure_power_operator(self):
        system = VolterraSystem(np.array([[1.0]]), FiniteKernel(np.zeros(0), dim=1))
        assert find_sigma(system).angles() == pytest.approx([0.0], abs=1e-10)

    def test_two_circle_roots(self):
        # A = rotation by 2.2 with zero kernel: roots at +-2.2 on the circle
        th = 2.2
        system = VolterraSystem(
            np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]),
            FiniteKernel(np.zeros((0,)), dim=2),
        )
        angles = sorted(find_sigma(system).angles())
        assert angles == pytest.approx([th, 2 * np.pi - th], abs=1e-10)

    def test_poly_unavailable_for_tabulated(self):
        tab = [sc for sc in gallery() if "tabulated" in sc.name][0]
        with pytest.raises(ValueError):
            find_sigma(tab.system, method="poly")
        assert find_sigma(tab.system).method == "scan-refine"

    def test_high_degree_falls_back_to_scan(self):
        rng = np.random.default_rng(0)
        terms = 0.01 * rng.standard_normal((70, 1, 1))
        system = VolterraSystem(np.array([[0.3]]), FiniteKernel(terms))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            sigma = find_sigma(system)
        assert sigma.method == "scan-refine"
        assert any("scan" in str(w.message) for w in caught)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            find_sigma(kt_system(), method="magic")


class TestScanCircle:
    def test_profile_minimum_at_root(self):
        thetas, smin = scan_circle(kt_system(), grid_size=512)
        assert int(np.argmin(smin)) == 0  # the root sits at angle 0
        assert smin[0] < 1e-12 < smin[256]

    def test_grid_floor(self):
        with pytest.raises(ValueError):
            scan_circle(kt_system(), grid_size=8)


class TestBoundedness:
    def test_flags_growth(self):
        bounded, slope, _ = boundedness_profile(1.01 ** np.arange(4000))
        assert not bounded and slope > 1e-3

    def test_accepts_bounded_oscillation(self):
        norms = np.abs(np.sin(0.1 * np.arange(4000))) + 0.5
        bounded, _, _ = boundedness_profile(norms)
        assert bounded

    def test_zero_sequence(self):
        bounded, slope, _ = boundedness_profile(np.zeros(100))
        assert bounded and slope == 0.0


class TestClassify:
    def test_difference_convergent_instance(self):
        report = classify(kt_system(), N=2000)
        assert report.verdict == "KTDifferenceConvergent"
        assert report.sigma_subset_one and not report.sigma_empty
        assert report.resolvent_bounded_empirical

    def test_asymptotically_stable_instance(self):
        report = classify(cor3_system(), N=1000)
        assert report.verdict == "AsymptoticallyStable"
        assert report.sigma_empty

    def test_unstable_instance(self):
        system = VolterraSystem(np.array([[3.0]]), FiniteKernel(np.zeros(0), dim=1))
        report = classify(system, N=2000)
        assert report.verdict == "UnstableEvidence"
        assert report.overflow_step >= 0 or report.growth_slope > 1e-3

    def test_pure_power_difference_convergence(self):
        system = VolterraSystem(np.array([[1.0]]), FiniteKernel(np.zeros(0), dim=1))
        report = classify(system, N=2000)
        assert report.verdict == "KTDifferenceConvergent"

    def test_abel_branch(self, monkeypatch):
        # decision table only: a decaying system with a spuriously reported
        # singular angle must land on the Abel-test verdict, not Inconclusive
        fake = SingularSet(
            [SingularPoint(angle=np.pi, residual=0.0, radius=1e-8)], "scan-refine"
        )
        monkeypatch.setattr(spectral, "find_sigma", lambda *a, **k: fake)
        report = classify(cor3_system(), N=1000)
        assert report.verdict == "StableByAbelTest"
        assert report.abel_results[np.pi].passed

    def test_gallery_contractions_never_unstable(self):
        for sc in gallery()[:4]:
            report = classify(sc.system, N=600)
            assert report.verdict in ("AsymptoticallyStable", "KTDifferenceConvergent")


def test_merge_points_keeps_best_residual():
    pts = [
        SingularPoint(0.0, 1e-12, 1e-8),
        SingularPoint(1e-9, 1e-15, 1e-8),
        SingularPoint(3.0, 1e-12, 1e-8),
    ]
    merged = spectral._merge_points(pts, 1e-6)
    assert len(merged) == 2
    assert merged[0].residual == 1e-15
