"""Singularity analysis of bounded sequences on the unit circle.

The central object is the shift resolvent R(lam, S)x(k) = sum_n lam^(-n-1)
x(n+k) for |lam| > 1, reduced modulo sequences that die out.  The quotient
norm of a tail is taken as a late-window maximum (a limsup proxy), and
singular directions on the circle are scored by how fast that norm grows
as lam approaches the circle radially.
"""

import cmath
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .model import seq_norms

__all__ = [
    "QuotientNormEstimate",
    "ResolventTail",
    "RayLimitEstimate",
    "SpectrumEstimate",
    "quotient_norm",
    "resolvent_S",
    "abel_test",
    "estimate_spectrum",
    "estimate_z_spectrum",
    "check_inclusion",
]

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class QuotientNormEstimate:
    value: float
    window_start: int
    window_end: int


@dataclass
class ResolventTail:
    """R(lam, S)x over tail indices 0..L-1, as exact partial sums of the
    available data, with a per-index bound on the dropped tail."""

    values: np.ndarray  # same shape as the input sequence
    lam: complex
    sup_bound: float

    def truncation_bound(self, k):
        """Bound on the dropped part of the series at tail index k."""
        L = self.values.shape[0]
        r = abs(self.lam)
        return self.sup_bound * r ** (-(L - np.asarray(k))) / (r - 1.0)


@dataclass
class RayLimitEstimate:
    target_angle: float
    samples: list  # (s, estimate) pairs, s strictly decreasing to 1
    limit: float
    passed: bool
    tol: float


@dataclass
class SpectrumEstimate:
    grid: np.ndarray  # angles in [0, 2pi)
    scores: np.ndarray  # per-angle score (growth exponent or ratio)
    detected: list  # angles flagged as singular
    profile: np.ndarray = None  # per-angle magnitude at the smallest s


def _window_bounds(length, K0, window):
    """Clip the requested late window [K0, K0+window] into the data, leaving
    room after it so resolvent tails keep enough terms."""
    if length < 4:
        raise ValueError("sequence too short for a late-window estimate")
    k0 = int(min(K0, (length - 1) // 2))
    k1 = int(min(k0 + window, (k0 + length - 1) // 2))
    if k1 <= k0:
        k1 = k0 + 1
    return k0, k1


def quotient_norm(x, K0=1000, K1=None):
    """max ||x(k)|| over k in [K0, K1]: a limsup proxy on l_inf/c0."""
    norms = seq_norms(np.asarray(x)) if np.asarray(x).ndim > 1 else np.abs(
        np.asarray(x, dtype=np.complex128)
    )
    L = norms.shape[0]
    if K1 is None:
        K1 = min(L - 1, K0 + 999)
    if not (0 <= K0 <= K1 < L):
        raise ValueError(f"window [{K0}, {K1}] outside data of length {L}")
    return QuotientNormEstimate(float(np.max(norms[K0 : K1 + 1])), int(K0), int(K1))


def _flatten_time(x):
    """View (L,), (L,d) or (L,d,d) data as (L, m) plus a reshape recipe."""
    x = np.asarray(x, dtype=np.complex128)
    shape = x.shape
    return x.reshape(shape[0], -1), shape


def resolvent_S(x, lam, sup_bound=None, backend=None):
    """Shift-resolvent tails via the backward recursion
    U(k) = (x(k) + U(k+1)) / lam, U(L) = 0."""
    lam = complex(lam)
    if abs(lam) <= 1.0:
        raise ValueError("resolvent_S requires |lam| > 1")
    flat, shape = _flatten_time(x)
    if sup_bound is None:
        sup_bound = float(np.max(np.linalg.norm(flat, axis=1))) if flat.size else 0.0
    tail = _kernels.shift_resolvent_tail(flat, lam, backend=backend)
    return ResolventTail(tail.reshape(shape), lam, float(sup_bound))


def _schedule(length, K1, base=0.1, max_points=8, min_points=3, floor=5.0):
    """Geometric s-1 schedule, halving from base, truncated where the data
    can no longer resolve the tail: (s-1)*(L-K1) >= floor.  Only the deepest
    max_points survive; scales far from the circle mix transient effects
    into the growth fit."""
    usable = max(length - K1, 2)
    vals = []
    h = base
    while h * usable >= floor or len(vals) < min_points:
        vals.append(1.0 + h)
        h *= 0.5
        if h < 1e-12:
            break
    return vals[-max_points:]


def _tail_quotient(x_flat, shape, lam, K0, K1, backend=None):
    tail = _kernels.shift_resolvent_tail(x_flat, lam, backend=backend)
    if len(shape) == 3:
        norms = seq_norms(tail[K0 : K1 + 1].reshape(-1, shape[1], shape[2]))
    else:
        norms = np.linalg.norm(tail[K0 : K1 + 1], axis=1)
    return float(np.max(norms))


def abel_test(x, target_angle, s_schedule=None, K0=1000, window=1000, tol=1e-2):
    """Estimate lim_{s->1} (s-1)*||R(s*xi0, S) x|| on the quotient and test
    it against tol.  The limit is 0 exactly when no mass sits at xi0."""
    flat, shape = _flatten_time(x)
    L = flat.shape[0]
    k0, k1 = _window_bounds(L, K0, window)
    if s_schedule is None:
        s_schedule = _schedule(L, k1)
    xi0 = cmath.exp(1j * target_angle)
    samples = []
    for s in s_schedule:
        q = _tail_quotient(flat, shape, s * xi0, k0, k1)
        samples.append((float(s), (s - 1.0) * q))
    vals = [v for _, v in samples]
    if len(vals) >= 2:
        # one Richardson step: first-order error in (s-1) under a halving schedule
        limit = max(2.0 * vals[-1] - vals[-2], 0.0)
    else:
        limit = vals[-1]
    return RayLimitEstimate(float(target_angle), samples, float(limit), limit <= tol, tol)


def _gamma_fit(qs, svals, floor):
    """Least-squares exponent gamma in q ~ (s-1)^(-gamma)."""
    qs = np.asarray(qs, dtype=float)
    if np.max(qs) <= floor:
        return 0.0
    logs = np.log(np.maximum(qs, floor * 1e-6))
    t = np.log(1.0 / (np.asarray(svals) - 1.0))
    A = np.vstack([t, np.ones_like(t)]).T
    slope = np.linalg.lstsq(A, logs, rcond=None)[0][0]
    return float(slope)


def estimate_spectrum(
    x,
    angle_grid=128,
    s_schedule=None,
    K0=1000,
    window=1000,
    gamma_threshold=0.5,
    refine=True,
    backend=None,
):
    """Score each direction e^(i*theta) by the growth exponent gamma of the
    quotient norm of R(s e^(i*theta), S)x as s decreases to 1; directions
    whose refined exponent reaches gamma_threshold are reported singular.

    Pole-like directions score near 1 (the resolvent bound caps the growth
    at 1/(s-1)); directions seen only through vanishing tails score near 0.
    """
    flat, shape = _flatten_time(x)
    L = flat.shape[0]
    k0, k1 = _window_bounds(L, K0, window)
    if s_schedule is None:
        s_schedule = _schedule(L, k1)
    if np.isscalar(angle_grid):
        grid = np.linspace(0.0, 2 * np.pi, int(angle_grid), endpoint=False)
    else:
        grid = np.sort(np.asarray(angle_grid, dtype=float) % (2 * np.pi))
    sup = float(np.max(np.linalg.norm(flat, axis=1))) if flat.size else 0.0
    floor = 1e-12 * (1.0 + sup)

    q = np.empty((len(grid), len(s_schedule)))
    for i, th in enumerate(grid):
        xi = cmath.exp(1j * th)
        for j, s in enumerate(s_schedule):
            q[i, j] = _tail_quotient(flat, shape, s * xi, k0, k1, backend=backend)
    scores = np.array([_gamma_fit(q[i], s_schedule, floor) for i in range(len(grid))])
    profile = q[:, -1]

    detected = []
    if len(grid) >= 3:
        s_min = s_schedule[-1]
        left = np.roll(profile, 1)
        right = np.roll(profile, -1)
        candidates = np.where((profile >= left) & (profile > right))[0]
        step = 2 * np.pi / len(grid)
        for i in candidates:
            if profile[i] <= max(10 * floor, 1e-9 * (1.0 + sup)):
                continue
            th = grid[i]
            if refine:
                th = _refine_peak(flat, shape, th, step, s_min, k0, k1, backend)
            gs = [
                _tail_quotient(flat, shape, s * cmath.exp(1j * th), k0, k1, backend)
                for s in s_schedule
            ]
            if _gamma_fit(gs, s_schedule, floor) >= gamma_threshold:
                detected.append(th % (2 * np.pi))
    detected = _dedupe_angles(detected, 2 * np.pi / max(len(grid), 4) / 2)
    return SpectrumEstimate(grid, scores, detected, profile)


def _refine_peak(flat, shape, center, step, s, k0, k1, backend):
    """Golden-section maximization of the tail quotient norm over an arc of
    one grid step to each side."""
    a, b = center - step, center + step

    def f(th):
        return _tail_quotient(flat, shape, s * cmath.exp(1j * th), k0, k1, backend)

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(40):
        if b - a < 1e-7:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _dedupe_angles(angles, min_gap):
    out = []
    for th in sorted(a % (2 * np.pi) for a in angles):
        if not out or _angle_dist(th, out[-1]) > min_gap:
            out.append(th)
    if len(out) >= 2 and _angle_dist(out[0], out[-1]) <= min_gap:
        out.pop()
    return out


def _angle_dist(a, b):
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def _zt_on_grid(flat, s, M):
    """x~(s e^(i theta_m)) on the equispaced grid theta_m = 2 pi m / M,
    via folding the damped sequence into M bins and one FFT."""
    L = flat.shape[0]
    damp = np.exp(-np.arange(L) * np.log(s))
    y = flat * damp[:, None]
    pad = (-L) % M
    if pad:
        y = np.vstack([y, np.zeros((pad, y.shape[1]), dtype=y.dtype)])
    folded = y.reshape(-1, M, y.shape[1]).sum(axis=0)
    return np.fft.fft(folded, axis=0)  # (M, m)


def estimate_z_spectrum(x, angle_grid=64, s_schedule=None, ratio_threshold=3.0):
    """Flag directions where ||x~(s e^(i theta))|| keeps growing as s drops
    to 1 (the transform fails to extend past the circle there).

    Growth is judged by the ratio of the value at the smallest s to the
    value at the largest s, so even logarithmic blow-up registers.
    """
    flat, shape = _flatten_time(x)
    if len(shape) == 3:
        raise ValueError("z-spectrum scoring expects scalar or vector sequences")
    if s_schedule is None:
        s_schedule = [2.0, 1.1, 1.01, 1.001]
    s_schedule = sorted(set(float(s) for s in s_schedule), reverse=True)
    if any(s <= 1.0 for s in s_schedule):
        raise ValueError("s-schedule must stay strictly outside the circle")
    M = int(angle_grid)
    grid = np.linspace(0.0, 2 * np.pi, M, endpoint=False)
    mags = np.empty((M, len(s_schedule)))
    for j, s in enumerate(s_schedule):
        vals = _zt_on_grid(flat, s, M)
        mags[:, j] = np.linalg.norm(vals, axis=1)
    small, big = mags[:, -1], mags[:, 0]
    tiny = 1e-12 * (1.0 + float(np.max(np.abs(flat)))) if flat.size else 1e-12
    scores = small / np.maximum(big, tiny)
    flagged = (scores > ratio_threshold) & (small > tiny)
    detected = []
    for i in range(M):
        if flagged[i] and small[i] >= small[i - 1] and small[i] > small[(i + 1) % M]:
            detected.append(float(grid[i]))
    return SpectrumEstimate(grid, scores, detected, small)


def check_inclusion(inner, outer, angular_tol):
    """Is every inner angle within angular_tol of some outer angle?
    Returns (ok, worst_angle, worst_distance)."""
    if isinstance(inner, SpectrumEstimate):
        inner = inner.detected
    inner = list(inner)
    outer = list(outer)
    worst_angle, worst_dist = None, 0.0
    for th in inner:
        d = min((_angle_dist(th, ph) for ph in outer), default=np.inf)
        if d > worst_dist:
            worst_angle, worst_dist = th, d
    return worst_dist <= angular_tol, worst_angle, float(worst_dist)
