"""Decay and almost-periodicity diagnostics for computed trajectories.

A sequence is split as x = (almost periodic part with finitely many
frequencies) + remainder; it counts as asymptotically almost periodic
when the remainder dies out.  Decay itself is judged on window maxima,
frequency content by Bohr means with phase-slope refinement.
"""

from dataclasses import dataclass

import numpy as np

from .model import seq_norms

__all__ = [
    "C0Result",
    "AAPDecomposition",
    "c0_test",
    "kt_difference_test",
    "bohr_coefficient",
    "detect_frequencies",
    "aap_decompose",
]


@dataclass
class C0Result:
    passed: bool
    window_maxima: np.ndarray
    tol: float


@dataclass
class AAPDecomposition:
    frequencies: list  # angles in [0, 2pi)
    coefficients: np.ndarray  # (J, d)
    remainder_profile: np.ndarray  # window maxima of the remainder norms
    is_aap: bool
    tol: float


def _norms(x):
    x = np.asarray(x)
    if x.ndim == 1:
        return np.abs(x.astype(np.complex128))
    return seq_norms(x)


def c0_test(x, windows=8, tol=1e-3):
    """Does the sequence die out?  Window maxima must step down (or already
    sit under tol) and the final window must be under tol.

    The "or already under tol" clause keeps exactly-zero sequences, whose
    maxima cannot strictly decrease, from being rejected.
    """
    norms = _norms(x)
    L = norms.shape[0]
    if L < 4:
        raise ValueError("need at least 4 samples")
    windows = max(4, min(int(windows), L))
    edges = np.linspace(0, L, windows + 1).astype(int)
    maxima = np.array(
        [np.max(norms[a:b]) if b > a else 0.0 for a, b in zip(edges[:-1], edges[1:])]
    )
    decreasing = all(
        maxima[i + 1] < maxima[i] or maxima[i + 1] <= tol
        for i in range(len(maxima) - 1)
    )
    passed = decreasing and maxima[-1] <= tol
    return C0Result(bool(passed), maxima, float(tol))


def kt_difference_test(X, windows=8, tol=1e-6):
    """c0_test on the difference sequence X(n+1) - X(n)."""
    values = getattr(X, "values", X)
    values = np.asarray(values)
    if values.shape[0] < 2:
        raise ValueError("need at least 2 samples to difference")
    return c0_test(values[1:] - values[:-1], windows=windows, tol=tol)


def bohr_coefficient(x, theta, N=None):
    """(1/N) sum_{n<N} x(n) e^{-i n theta}."""
    x = np.asarray(x, dtype=np.complex128)
    squeeze = x.ndim == 1
    if squeeze:
        x = x.reshape(-1, 1)
    if N is None:
        N = x.shape[0]
    if N < 1:
        raise ValueError("N must be at least 1")
    n = np.arange(N)
    c = np.exp(-1j * n * theta) @ x[:N] / N
    return c[0] if squeeze else c


def _refine_frequency(seg, theta, rounds=3):
    """Sharpen a frequency estimate by comparing Bohr coefficients on the
    two halves of the segment: a drift delta shows up as a phase advance of
    half_len * delta between them."""
    L = seg.shape[0]
    half = L // 2
    if half < 4:
        return theta
    for _ in range(rounds):
        n1 = np.arange(half)
        c1 = np.exp(-1j * n1 * theta) @ seg[:half] / half
        c2 = np.exp(-1j * (n1 + half) * theta) @ seg[half : 2 * half] / half
        a1, a2 = np.vdot(c1, c1) ** 0.5, np.vdot(c2, c2) ** 0.5
        if abs(a1) < 1e-300 or abs(a2) < 1e-300:
            break
        drift = np.vdot(c1, c2)  # phase of <c1, c2> advances by half*delta
        theta = (theta + np.angle(drift) / half) % (2 * np.pi)
    return theta


def detect_frequencies(x, max_freqs=8, rel_threshold=0.1, floor=None):
    """Candidate angles of persistent oscillation in the late half of the
    data: Hann-windowed FFT peaks, refined by Bohr phase slopes.

    floor is an absolute amplitude cutoff (default 1e-3 times the global
    sup norm); sequences that die out report no frequencies.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    L = x.shape[0]
    if L < 16:
        raise ValueError("need at least 16 samples")
    sup = float(np.max(np.linalg.norm(x, axis=1)))
    if floor is None:
        floor = 1e-3 * (sup if sup > 0 else 1.0)
    seg = x[L // 2 :]
    S = seg.shape[0]
    w = np.hanning(S)
    F = np.fft.fft(seg * w[:, None], axis=0)
    power = np.linalg.norm(F, axis=1)
    # amplitude of a pure tone after the Hann window is sum(w) * |a|
    amp = power / np.sum(w)
    peak = float(np.max(amp))
    if peak < floor:
        return []
    freqs = []
    for i in range(S):
        if amp[i] < max(rel_threshold * peak, floor):
            continue
        if amp[i] < amp[i - 1] or amp[i] <= amp[(i + 1) % S]:
            continue
        theta = _refine_frequency(seg, 2 * np.pi * i / S)
        coeff = bohr_coefficient(seg, theta)
        if float(np.linalg.norm(np.atleast_1d(coeff))) >= floor:
            freqs.append((float(np.linalg.norm(np.atleast_1d(coeff))), theta))
    freqs.sort(reverse=True)
    out = []
    for _, th in freqs[: max_freqs * 2]:
        if all(_circ_dist(th, u) >= 2 * np.pi / L for u in out):
            out.append(th)
        if len(out) >= max_freqs:
            break
    return sorted(out)


def _circ_dist(a, b):
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def aap_decompose(x, candidate_frequencies=None, windows=8, tol=1e-3):
    """Split x into finitely many circle modes plus a remainder and test the
    remainder for decay.  tol is relative to the sup norm of x.

    Coefficients start from Bohr means and are polished by least squares on
    the late half, which removes the cross-talk between nearby modes that a
    plain Cesaro mean of finite length leaves behind.
    """
    x = np.asarray(x, dtype=np.complex128)
    squeeze = x.ndim == 1
    if squeeze:
        x = x.reshape(-1, 1)
    L, d = x.shape
    sup = float(np.max(np.linalg.norm(x, axis=1)))
    tol_abs = tol * (sup if sup > 0 else 1.0)

    if candidate_frequencies is None:
        freqs = detect_frequencies(x)
    else:
        freqs = sorted(float(f) % (2 * np.pi) for f in candidate_frequencies)
        for a, b in zip(freqs, freqs[1:]):
            if _circ_dist(a, b) < 2 * np.pi / L:
                raise ValueError(
                    f"frequencies {a:.6f} and {b:.6f} closer than 2*pi/{L}"
                )

    if freqs:
        n_late = np.arange(L // 2, L)
        E = np.exp(1j * np.outer(n_late, freqs))  # (late, J)
        coeffs, *_ = np.linalg.lstsq(E, x[L // 2 :], rcond=None)
        n_all = np.arange(L)
        model = np.exp(1j * np.outer(n_all, freqs)) @ coeffs
        remainder = x - model
    else:
        coeffs = np.zeros((0, d), dtype=np.complex128)
        remainder = x.copy()

    profile = c0_test(remainder, windows=windows, tol=tol_abs)
    return AAPDecomposition(
        frequencies=list(freqs),
        coefficients=coeffs,
        remainder_profile=profile.window_maxima,
        is_aap=profile.passed,
        tol=float(tol_abs),
    )
