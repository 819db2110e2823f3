"""The characteristic operator D(z) = zI - A - B~(z) and the singular set.

Points of the unit circle where D fails to be invertible control the
asymptotics of the resolvent sequence.  Two detectors are provided: an
exact polynomial path (clear the kernel's rational transform to a matrix
polynomial, take determinant roots) and a scan of the smallest singular
value around the circle with golden-section refinement.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .seqspec import GOLDEN, _angle_dist, abel_test
from .solver import SolverOverflow, resolvent
from .ztransform import zt_kernel

__all__ = [
    "SingularPoint",
    "SingularSet",
    "ClassificationReport",
    "delta",
    "scan_circle",
    "find_sigma",
    "classify",
    "boundedness_profile",
    "VERDICTS",
]

VERDICTS = (
    "AsymptoticallyStable",
    "KTDifferenceConvergent",
    "StableByAbelTest",
    "UnstableEvidence",
    "Inconclusive",
)


@dataclass
class SingularPoint:
    angle: float  # in [0, 2pi)
    residual: float  # sigma_min(D(e^{i angle}))
    radius: float  # localization radius


@dataclass
class SingularSet:
    points: list
    method: str  # "polynomial-roots" | "scan-refine"

    def angles(self):
        return [p.angle for p in self.points]

    @property
    def is_empty(self):
        return not self.points

    def subset_of_one(self, tol=1e-6):
        """All points at the circle point 1 (angle 0), up to tol."""
        return all(
            _angle_dist(p.angle, 0.0) <= max(tol, p.radius) for p in self.points
        )


@dataclass
class ClassificationReport:
    verdict: str
    sigma: SingularSet
    sigma_empty: bool
    sigma_subset_one: bool
    resolvent_bounded_empirical: bool
    sup_norm: float
    growth_slope: float
    abel_results: dict  # angle -> RayLimitEstimate
    horizon: int
    overflow_step: int = -1


def delta(system, z):
    """zI - A - B~(z)."""
    z = complex(z)
    bz = zt_kernel(system.kernel, z).value
    return z * np.eye(system.dim, dtype=np.complex128) - system.A - bz


def _delta_many(system, zs):
    zs = np.asarray(zs, dtype=np.complex128)
    bz, _ = system.kernel.zt_many(zs)
    eye = np.eye(system.dim, dtype=np.complex128)
    return zs[:, None, None] * eye - system.A - bz


def _sigma_min_many(system, zs):
    return np.linalg.svd(_delta_many(system, zs), compute_uv=False)[:, -1]


def _sigma_min(system, z):
    return float(np.linalg.svd(delta(system, z), compute_uv=False)[-1])


def scan_circle(system, grid_size=2048):
    """sigma_min(D(e^{i theta})) on an equispaced angle grid, ordered by theta."""
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    thetas = np.linspace(0.0, 2 * np.pi, grid_size, endpoint=False)
    smin = _sigma_min_many(system, np.exp(1j * thetas))
    return thetas, smin


def _det_poly(stack):
    """Coefficients (ascending) of det P(z) for a matrix polynomial given as
    an ascending stack P(z) = sum_p stack[p] z^p, via interpolation at roots
    of unity."""
    D = stack.shape[0] - 1
    d = stack.shape[1]
    deg = d * D
    nfft = 1
    while nfft < deg + 1:
        nfft *= 2
    w = np.exp(2j * np.pi * np.arange(nfft) / nfft)
    powers = w[:, None] ** np.arange(D + 1)
    mats = np.einsum("tp,pij->tij", powers, stack)
    dets = np.linalg.det(mats)
    coeffs = np.fft.fft(dets) / nfft
    return coeffs[: deg + 1]


def _sigma_poly(system, root_circle_tol):
    """Circle roots of det D(z) after clearing the kernel's denominator.

    Returns None when the kernel has no rational transform or the cleared
    polynomial is too large to trust."""
    rat = system.kernel.rational_zt()
    if rat is None:
        return None
    Q, q = rat
    d = system.dim
    Dq = q.shape[0] - 1
    Dp = Dq + 1
    if d * Dp > 64:
        warnings.warn(
            f"characteristic polynomial degree {d * Dp} > 64; using circle scan",
            RuntimeWarning,
        )
        return None
    # P(z) = z q(z) I - q(z) A - Q(z), so det P = q^d det D
    eye = np.eye(d, dtype=np.complex128)
    stack = np.zeros((Dp + 1, d, d), dtype=np.complex128)
    stack[1:, :, :] += q[:, None, None] * eye
    stack[: Dq + 1] -= q[:, None, None] * system.A
    stack[: Q.shape[0]] -= Q
    coeffs = _det_poly(stack)
    if not np.all(np.isfinite(coeffs)):
        warnings.warn("characteristic polynomial overflowed; using circle scan",
                      RuntimeWarning)
        return None
    roots = np.roots(coeffs[::-1])
    angles = [
        float(np.angle(r) % (2 * np.pi))
        for r in roots
        if abs(abs(r) - 1.0) <= root_circle_tol
    ]
    points = [
        SingularPoint(th, _sigma_min(system, np.exp(1j * th)), root_circle_tol)
        for th in sorted(angles)
    ]
    return SingularSet(_merge_points(points, root_circle_tol), "polynomial-roots")


def _merge_points(points, min_gap):
    """Collapse clusters closer than min_gap, keeping the smallest residual."""
    out = []
    for p in sorted(points, key=lambda p: p.angle):
        if out and _angle_dist(p.angle, out[-1].angle) <= min_gap:
            if p.residual < out[-1].residual:
                out[-1] = p
            continue
        out.append(p)
    if len(out) >= 2 and _angle_dist(out[0].angle, out[-1].angle) <= min_gap:
        keep = out[0] if out[0].residual <= out[-1].residual else out[-1]
        out = [keep] + out[1:-1]
    return out


def _refine_minimum(system, center, step):
    """Golden-section minimization of sigma_min over one grid step each way."""
    a, b = center - step, center + step

    def f(th):
        return _sigma_min(system, np.exp(1j * th))

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-10:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    th = 0.5 * (a + b)
    return th, f(th), b - a


def _sigma_scan(system, singular_tol, grid_size=2048, coarse_gate=0.05):
    thetas, smin = scan_circle(system, grid_size)
    step = 2 * np.pi / grid_size
    left = np.roll(smin, 1)
    right = np.roll(smin, -1)
    candidates = np.where((smin <= left) & (smin < right) & (smin < coarse_gate))[0]
    points = []
    for i in candidates:
        th, res, width = _refine_minimum(system, thetas[i], step)
        if res < singular_tol:
            points.append(SingularPoint(th % (2 * np.pi), float(res), float(width)))
    return SingularSet(_merge_points(points, step / 2), "scan-refine")


def find_sigma(
    system,
    singular_tol=1e-8,
    root_circle_tol=1e-8,
    grid_size=2048,
    method="auto",
):
    """The set of circle points where D(z) is singular.

    method: "auto" prefers the exact polynomial path and falls back to the
    scan; "poly" and "scan" force one path ("poly" errors on tabulated
    kernels, which have no rational transform).
    """
    if method not in ("auto", "poly", "scan"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "poly"):
        result = _sigma_poly(system, root_circle_tol)
        if result is not None:
            return result
        if method == "poly":
            raise ValueError("polynomial path unavailable for this kernel")
    return _sigma_scan(system, singular_tol, grid_size)


def boundedness_profile(norms, windows=16, slope_tol=1e-3):
    """Empirical growth test: least-squares slope (per step) of the log of
    window maxima over the last half of the horizon."""
    norms = np.asarray(norms, dtype=float)
    L = norms.shape[0]
    windows = max(4, min(windows, L // 2))
    edges = np.linspace(0, L, windows + 1).astype(int)
    centers = 0.5 * (edges[:-1] + edges[1:])
    maxima = np.array(
        [np.max(norms[a:b]) if b > a else 0.0 for a, b in zip(edges[:-1], edges[1:])]
    )
    half = windows // 2
    m = maxima[half:]
    c = centers[half:]
    scale = np.max(maxima)
    if scale == 0.0:
        return True, 0.0, maxima
    logs = np.log(np.maximum(m, scale * 1e-300))
    A = np.vstack([c, np.ones_like(c)]).T
    slope = float(np.linalg.lstsq(A, logs, rcond=None)[0][0])
    return slope <= slope_tol, slope, maxima


def classify(
    system,
    N=2000,
    singular_tol=1e-8,
    root_circle_tol=1e-8,
    abel_tol=1e-2,
    slope_tol=1e-3,
    K0=1000,
    window=1000,
    grid_size=2048,
):
    """Resolvent-based stability classification.

    Decision table (growth first): growth -> UnstableEvidence; empty singular
    set and bounded -> AsymptoticallyStable; singular set inside {1} and
    bounded -> AsymptoticallyStable when the Abel limit at 1 vanishes, else
    KTDifferenceConvergent; all Abel limits vanish on a finite singular set
    with bounded resolvent -> StableByAbelTest; otherwise Inconclusive.
    """
    sigma = find_sigma(system, singular_tol, root_circle_tol, grid_size)
    overflow_step = -1
    try:
        R = resolvent(system, N)
        values = R.values
        norms = R.norms()
    except SolverOverflow as e:
        overflow_step = e.step
        values = None
        norms = None

    if norms is not None:
        bounded, slope, _ = boundedness_profile(norms, slope_tol=slope_tol)
        sup = float(np.max(norms))
    else:
        bounded, slope, sup = False, float("inf"), float("inf")

    abel_results = {}
    if values is not None and not sigma.is_empty:
        for p in sigma.points:
            abel_results[p.angle] = abel_test(
                values, p.angle, K0=K0, window=window, tol=abel_tol
            )

    if not bounded:
        verdict = "UnstableEvidence"
    elif sigma.is_empty:
        verdict = "AsymptoticallyStable"
    elif sigma.subset_of_one():
        at_one = next(iter(abel_results.values()))
        verdict = "AsymptoticallyStable" if at_one.passed else "KTDifferenceConvergent"
    elif abel_results and all(r.passed for r in abel_results.values()):
        verdict = "StableByAbelTest"
    else:
        verdict = "Inconclusive"

    return ClassificationReport(
        verdict=verdict,
        sigma=sigma,
        sigma_empty=sigma.is_empty,
        sigma_subset_one=sigma.subset_of_one(),
        resolvent_bounded_empirical=bounded,
        sup_norm=sup,
        growth_slope=slope,
        abel_results=abel_results,
        horizon=N,
        overflow_step=overflow_step,
    )
