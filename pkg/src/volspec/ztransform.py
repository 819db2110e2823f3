"""Z-transforms x~(z) = sum_j x(j) z^(-j) with honest truncation bounds.

Closed forms (finite and geometric-sum kernels) carry a zero bound.
Tabulated data is only ever summed for |z| > 1, where the dropped tail
is controlled by a declared or observed sup bound.
"""

from dataclasses import dataclass

import numpy as np

from .model import FiniteKernel, GeometricKernel, TabulatedKernel

__all__ = [
    "ZValue",
    "CheckResult",
    "zt_sequence",
    "zt_kernel",
    "shift_rule_check",
    "convolution_rule_check",
    "initial_value_check",
]


@dataclass
class ZValue:
    """An evaluated transform plus a bound on the truncation error."""

    value: np.ndarray
    truncation_error_bound: float = 0.0


@dataclass
class CheckResult:
    residual: float
    allowance: float
    gaps: list = None
    monotone: bool = True

    @property
    def passed(self):
        return self.residual <= self.allowance


def _window(x):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2:
        raise ValueError(f"expected a sequence window, got shape {x.shape}")
    return x


def zt_sequence(x, z, sup_bound=None):
    """Partial sum over a window x(0..N-1), for |z| > 1 strictly.

    sup_bound caps ||x(n)|| over the whole (infinite) sequence; if omitted
    the window sup is used, which is honest whenever the window attains it.
    """
    z = complex(z)
    if abs(z) <= 1.0:
        raise ValueError("zt_sequence requires |z| > 1")
    x = _window(x)
    N = x.shape[0]
    if N == 0:
        raise ValueError("empty window")
    if sup_bound is None:
        sup_bound = float(np.max(np.linalg.norm(x, axis=1)))
    val = x[N - 1].copy()
    for j in range(N - 2, -1, -1):  # Horner in 1/z
        val = val / z + x[j]
    r = 1.0 / abs(z)
    bound = sup_bound * r**N / (1.0 - r)
    return ZValue(val, float(bound))


def zt_kernel(kernel, z):
    """B~(z) through the kernel's own evaluation rules."""
    z = complex(z)
    if isinstance(kernel, GeometricKernel):
        rmax = float(np.max(np.abs(kernel.ratios)))
        if abs(z) <= rmax:
            raise ValueError(f"geometric-sum transform needs |z| > {rmax:g}")
    elif isinstance(kernel, TabulatedKernel):
        if abs(z) < 1.0:
            raise ValueError("tabulated transform needs |z| >= 1")
    val, bound = kernel.zt(z)
    return ZValue(val, float(bound))


def _roundoff(z, scale):
    """Floating-point slack for identity checks; truncation bounds shrink
    geometrically with the window and eventually dip under roundoff."""
    return 1e-12 * (1.0 + abs(z)) * (1.0 + scale)


def shift_rule_check(x, z, sup_bound=None):
    """Residual of zt(Sx)(z) = z*zt(x)(z) - z*x(0) against combined bounds."""
    x = _window(x)
    z = complex(z)
    fx = zt_sequence(x, z, sup_bound)
    if x.shape[0] < 2:
        shifted = np.zeros_like(x[:1])
    else:
        shifted = x[1:]
    fsx = zt_sequence(shifted, z, sup_bound)
    rhs = z * fx.value - z * x[0]
    residual = float(np.linalg.norm(fsx.value - rhs))
    sup = float(np.max(np.linalg.norm(x, axis=1)))
    allowance = (
        fsx.truncation_error_bound
        + abs(z) * fx.truncation_error_bound
        + _roundoff(z, sup)
    )
    return CheckResult(residual, float(allowance))


def convolution_rule_check(kernel, x, z, sup_bound=None):
    """Residual of zt(B*x)(z) = B~(z) zt(x)(z) against combined bounds."""
    x = _window(x)
    z = complex(z)
    if kernel.dim != x.shape[1]:
        raise ValueError("kernel and sequence dimensions differ")
    N = x.shape[0]
    B = kernel.eval_range(N)
    conv = np.empty_like(x)
    for n in range(N):
        conv[n] = np.einsum("kij,kj->i", B[: n + 1], x[: n + 1][::-1])
    if sup_bound is None:
        sup_bound = float(np.max(np.linalg.norm(x, axis=1)))
    conv_sup = kernel.norm_sum() * sup_bound
    lhs = zt_sequence(conv, z, conv_sup)
    fk = zt_kernel(kernel, z)
    fx = zt_sequence(x, z, sup_bound)
    rhs = fk.value @ fx.value
    residual = float(np.linalg.norm(lhs.value - rhs))
    allowance = (
        lhs.truncation_error_bound
        + np.linalg.norm(fk.value, 2) * fx.truncation_error_bound
        + fk.truncation_error_bound
        * (np.linalg.norm(fx.value) + fx.truncation_error_bound)
        + _roundoff(z, (1.0 + kernel.norm_sum()) * sup_bound)
    )
    if isinstance(kernel, TabulatedKernel) and kernel.tail_norm_bound > 0:
        # the windowed convolution itself used the zero-extended kernel
        r = 1.0 / abs(z)
        allowance += kernel.tail_norm_bound * sup_bound / (1.0 - r)
    return CheckResult(residual, float(allowance))


def initial_value_check(x, schedule=(10.0, 100.0, 1000.0), sup_bound=None):
    """|zt(x)(s) - x(0)| along a growing real schedule.

    Raw gaps can fluctuate when later terms cancel, so convergence is
    judged against the decreasing envelope sup||x|| / (s - 1): every gap
    must sit under its own envelope value, the last one in particular.
    """
    x = _window(x)
    if sup_bound is None:
        sup_bound = float(np.max(np.linalg.norm(x, axis=1)))
    gaps = []
    monotone = True
    for s in schedule:
        fx = zt_sequence(x, s, sup_bound)
        gap = float(np.linalg.norm(fx.value - x[0]))
        gaps.append(gap + fx.truncation_error_bound)
        if gaps[-1] > sup_bound / (float(s) - 1.0) + _roundoff(s, sup_bound):
            monotone = False
    s_last = float(schedule[-1])
    allowance = sup_bound / (s_last - 1.0) + _roundoff(s_last, sup_bound)
    return CheckResult(gaps[-1], float(allowance), gaps=gaps, monotone=monotone)
