"""End-to-end checks against closed-form oracles and structural invariants.

Each criterion solves real systems and compares against values derived
independently (partial fractions, dominant roots, exact transforms) or
against inequalities that hold exactly for the computed quantities.  The
runners return plain dicts so both the test suite and the CLI `verify`
subcommand can drive them.
"""

import time
import warnings

import numpy as np

from .aap import aap_decompose, c0_test, detect_frequencies
from .bench import run_bench
from .gallery import cor3_system, decaying_variant, gallery, kt_system, with_forcing
from .model import (
    ConstantForcing,
    FiniteKernel,
    GeometricKernel,
    HarmonicForcing,
    TabulatedKernel,
    VolterraSystem,
    ZeroForcing,
)
from .seqspec import (
    check_inclusion,
    estimate_spectrum,
    estimate_z_spectrum,
    quotient_norm,
    resolvent_S,
)
from .solver import resolvent, solve, solve_fast
from .spectral import find_sigma
from .ztransform import convolution_rule_check, initial_value_check, shift_rule_check

__all__ = ["CRITERIA", "run", "format_report"]


def _report(cid, name, passed, measured, runtime, warning=None):
    out = {
        "id": cid,
        "name": name,
        "passed": bool(passed),
        "measured": measured,
        "runtime": float(runtime),
    }
    if warning:
        out["warning"] = warning
    return out


def _circ_dist(a, b):
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


def criterion_1():
    """Scalar resolvent against its partial-fraction closed form."""
    t0 = time.perf_counter()
    X = resolvent(kt_system(), 100)
    n = np.arange(101)
    oracle = 2.0 / 3.0 + (1.0 / 3.0) * 0.25**n
    err = float(np.max(np.abs(X.values[:, 0, 0] - oracle)))
    rt = time.perf_counter() - t0
    passed = err <= 1e-10 and rt < 1.0
    return _report(1, "resolvent closed form", passed, f"max err {err:.2e}", rt)


def criterion_2():
    """Singular set {0} forces the resolvent differences to die out at the
    closed-form geometric rate."""
    t0 = time.perf_counter()
    system = kt_system()
    sigma = find_sigma(system)
    angles = sigma.angles()
    sigma_ok = len(angles) == 1 and abs(angles[0]) <= 1e-6
    X = resolvent(system, 201)
    diff = np.abs(np.diff(X.values[:, 0, 0]))  # diff[n] = |X(n+1) - X(n)|
    tail = float(np.max(diff[150:201]))
    # the decay law |X(n+1)-X(n)| = 0.25^n/4 is only representable at small n
    ns = np.arange(5, 21)
    ratios = diff[ns] / (0.25**ns / 4.0)
    factor_ok = bool(np.all((ratios >= 0.5) & (ratios <= 2.0)))
    rt = time.perf_counter() - t0
    passed = sigma_ok and tail <= 1e-20 and factor_ok and rt < 5.0
    measured = (
        f"sigma={[f'{a:.2e}' for a in angles]}, tail max {tail:.1e}, "
        f"rate ratios [{ratios.min():.3f}, {ratios.max():.3f}]"
    )
    return _report(2, "difference decay with singular set {0}", passed, measured, rt)


def criterion_3():
    """Empty singular set (both root and scan paths) with fast decay."""
    t0 = time.perf_counter()
    system = cor3_system()
    s_poly = find_sigma(system, method="poly")
    s_scan = find_sigma(system, method="scan")
    X = resolvent(system, 100)
    val = float(abs(X.values[100, 0, 0]))
    rt = time.perf_counter() - t0
    passed = s_poly.is_empty and s_scan.is_empty and val <= 1e-6 and rt < 5.0
    measured = (
        f"poly {len(s_poly.points)} pts, scan {len(s_scan.points)} pts, "
        f"|X(100)|={val:.2e}"
    )
    return _report(3, "empty singular set decay", passed, measured, rt)


def _random_kernel(rng, d):
    kind = rng.integers(0, 3)
    if kind == 0:
        m = int(rng.integers(1, 6))
        terms = 0.3 * (rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d)))
        return FiniteKernel(terms, dim=d)
    if kind == 1:
        J = int(rng.integers(1, 4))
        coeffs = 0.3 * (rng.standard_normal((J, d, d)) + 1j * rng.standard_normal((J, d, d)))
        ratios = rng.uniform(0.1, 0.8, J) * np.exp(2j * np.pi * rng.random(J))
        return GeometricKernel(coeffs, ratios)
    K = int(rng.integers(16, 65))
    base = 0.3 * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    r = float(rng.uniform(0.3, 0.7))
    values = base[None] * (r ** np.arange(K))[:, None, None]
    tail = float(np.linalg.norm(base, 2)) * r**K / (1.0 - r)
    return TabulatedKernel(values, tail_norm_bound=tail)


def criterion_4():
    """Shift rule, convolution rule, and initial-value limit on random data,
    judged against their combined truncation allowances."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    failures = checks = 0
    worst = 0.0
    for _ in range(100):
        d = int(rng.integers(1, 3))
        L = int(rng.integers(8, 129))
        x = rng.standard_normal((L, d)) + 1j * rng.standard_normal((L, d))
        kernel = _random_kernel(rng, d)
        zs = rng.uniform(1.1, 3.0, 10) * np.exp(2j * np.pi * rng.random(10))
        for z in zs:
            for res in (shift_rule_check(x, z), convolution_rule_check(kernel, x, z)):
                checks += 1
                failures += not res.passed
                if res.allowance > 0:
                    worst = max(worst, res.residual / res.allowance)
        res = initial_value_check(x)
        checks += 1
        failures += not res.passed
    rt = time.perf_counter() - t0
    measured = f"{failures}/{checks} failures, worst residual/allowance {worst:.2e}"
    return _report(4, "transform identities on random data", failures == 0, measured, rt)


def criterion_5():
    """x(n)=1/n: no sequence spectrum (quotient modulo vanishing tails kills
    it) while the transform itself blows up logarithmically at angle 0."""
    t0 = time.perf_counter()
    x = 1.0 / np.arange(1, 1_000_001)
    est = estimate_spectrum(x, angle_grid=24, K0=1000)
    max_gamma = float(np.max(est.scores))
    seq_ok = len(est.detected) == 0 and max_gamma < 0.5
    xz = 1.0 / np.arange(1, 2_000_001)
    zest = estimate_z_spectrum(xz, angle_grid=64)
    at_zero = float(zest.profile[0])  # grid starts at angle 0; oracle ln(1001)
    z_ok = any(_circ_dist(th, 0.0) < 1e-9 for th in zest.detected) and at_zero >= 6.0
    rt = time.perf_counter() - t0
    passed = seq_ok and z_ok and rt < 10.0
    measured = (
        f"max gamma {max_gamma:.3f}, detected {len(est.detected)}; "
        f"z-profile(0) {at_zero:.3f} vs ln(1001)={np.log(1001.0):.3f}"
    )
    return _report(5, "sequence vs transform spectrum separation", passed, measured, rt)


def _marginal_scalar(rng):
    """Scalar (a, C, r) whose characteristic function vanishes exactly at a
    chosen circle point; the second root stays inside the disk."""
    phi0 = float(rng.uniform(0.0, 2 * np.pi))
    z0 = np.exp(1j * phi0)
    r = float(rng.uniform(0.1, 0.5))
    C = 0.15 * np.exp(2j * np.pi * rng.random()) * rng.uniform(0.3, 1.0)
    a = z0 - C * z0 / (z0 - r)
    return complex(a), complex(C), r, phi0


def _contracting_scalar(rng):
    r = float(rng.uniform(0.1, 0.5))
    a = rng.uniform(0.1, 0.5) * np.exp(2j * np.pi * rng.random())
    C = rng.uniform(0.05, 0.2) * np.exp(2j * np.pi * rng.random())
    return complex(a), complex(C), r


def _random_unitary(rng, d):
    M = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(M)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def criterion_6():
    """Every angle detected in a solution's spectrum lies near the system's
    singular set or the forcing frequency."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    violations = []
    for i in range(20):
        d = 1 if i % 2 == 0 else 2
        marginal = i % 3 == 0
        phi0 = None
        if d == 1:
            if marginal:
                a, C, r, phi0 = _marginal_scalar(rng)
            else:
                a, C, r = _contracting_scalar(rng)
            A = np.array([[a]])
            coeffs = np.array([[[C]]])
        else:
            if marginal:
                a1, C1, r, phi0 = _marginal_scalar(rng)
            else:
                a1, C1, r = _contracting_scalar(rng)
            a2, C2, _ = _contracting_scalar(rng)
            U = _random_unitary(rng, 2)
            A = U @ np.diag([a1, a2]) @ U.conj().T
            coeffs = (U @ np.diag([C1, C2]) @ U.conj().T)[None]
        system = VolterraSystem(A.astype(np.complex128), GeometricKernel(coeffs, np.array([r])))
        harmonic = bool(rng.integers(0, 2))
        if harmonic:
            theta_f = float(rng.uniform(0.0, 2 * np.pi))
            while phi0 is not None and _circ_dist(theta_f, phi0) < 0.3:
                theta_f = float(rng.uniform(0.0, 2 * np.pi))
            amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            forcing = HarmonicForcing(np.array([theta_f]), amps[None])
        else:
            theta_f = None
            forcing = ZeroForcing(d)
        x0 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        x = solve(system, forcing, x0, 4096)
        est = estimate_spectrum(x.values, angle_grid=128, K0=1000)
        outer = list(find_sigma(system).angles())
        if theta_f is not None:
            outer.append(theta_f)
        ok, worst_angle, worst_dist = check_inclusion(est, outer, 1e-2)
        if not ok:
            violations.append((i, worst_angle, worst_dist))
    rt = time.perf_counter() - t0
    measured = f"{len(violations)} violations over 20 systems"
    if violations:
        measured += f"; first: system {violations[0][0]} off by {violations[0][2]:.2e}"
    return _report(6, "solution spectrum inclusion", not violations, measured, rt)


def criterion_7():
    """Gallery contractions: decaying forcing washes out; a single harmonic
    survives as the almost periodic part at the right frequency."""
    t0 = time.perf_counter()
    fails = []
    for idx, sc in enumerate(gallery()):
        dec = decaying_variant(sc, inverse=(idx in (2, 7)))
        xd = solve(dec.system, dec.forcing, dec.x0, dec.N)
        if not c0_test(xd.values, tol=1e-3).passed:
            fails.append(f"{sc.name}:c0")
        xh = solve(sc.system, sc.forcing, sc.x0, sc.N)
        dec2 = aap_decompose(xh.values)
        theta_f = float(sc.forcing.angles[0])
        fdist = min((_circ_dist(f, theta_f) for f in dec2.frequencies), default=np.inf)
        if not (dec2.is_aap and fdist <= 2 * np.pi / sc.N):
            fails.append(f"{sc.name}:aap")
    rt = time.perf_counter() - t0
    measured = f"{len(fails)} failures" + (f" ({', '.join(fails)})" if fails else "")
    return _report(7, "contraction stability gallery", not fails, measured, rt)


def criterion_8():
    """Constant forcing never washes out: the solution keeps mass at angle 0."""
    t0 = time.perf_counter()
    fails = []
    for sc in gallery():
        cf = with_forcing(sc, ConstantForcing(np.ones(sc.system.dim)))
        xc = solve(cf.system, cf.forcing, cf.x0, cf.N)
        if c0_test(xc.values, tol=1e-3).passed:
            fails.append(f"{sc.name}:c0")
        freqs = detect_frequencies(xc.values)
        if not any(_circ_dist(f, 0.0) <= 2 * np.pi / sc.N for f in freqs):
            fails.append(f"{sc.name}:freq0")
    rt = time.perf_counter() - t0
    measured = f"{len(fails)} failures" + (f" ({', '.join(fails)})" if fails else "")
    return _report(8, "constant forcing obstruction", not fails, measured, rt)


def criterion_9():
    """The FFT path reproduces the stepwise recursion; the wall-clock ratio
    is reported and warned on (not failed) when below 3."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(1, 4))
        A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        A *= 0.4 / max(1.0, np.linalg.norm(A, 2))
        C = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        r = float(rng.uniform(0.2, 0.7))
        C *= 0.4 * (1.0 - r) / max(1.0, np.linalg.norm(C, 2))
        kernel = GeometricKernel(C[None], np.array([r]))
        system = VolterraSystem(A, kernel)  # norm budget <= 0.8: bounded orbits
        amps = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        forcing = HarmonicForcing(np.array([rng.uniform(0, 2 * np.pi)]), amps[None])
        x0 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        slow = solve(system, forcing, x0, 4096, backend="numpy")
        fast = solve_fast(system, forcing, x0, 4096)
        worst = max(worst, float(np.max(np.abs(slow.values - fast.values))))
    bench = run_bench(N=4096, d=2, repeats=3)
    ratio = bench["ratio_naive_over_fast"]
    warning = None
    if ratio <= 3.0:
        warning = f"naive/fast ratio {ratio:.2f} <= 3 on this machine"
        warnings.warn(warning)
    rt = time.perf_counter() - t0
    passed = worst <= 1e-9
    measured = f"sup |fast - naive| {worst:.2e}, naive/fast ratio {ratio:.2f}"
    return _report(9, "fast path equivalence", passed, measured, rt, warning)


def criterion_10():
    """Shift-resolvent quotient bound on the gallery solutions."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    violations = 0
    trials = 0
    for sc in gallery():
        x = solve(sc.system, sc.forcing, sc.x0, sc.N)
        L = x.values.shape[0]
        rhs_q = quotient_norm(x.values, 1000, L - 1).value
        for _ in range(20):
            lam = rng.uniform(1.01, 2.0) * np.exp(2j * np.pi * rng.random())
            tail = resolvent_S(x.values, lam)
            lhs = quotient_norm(tail.values)
            rhs = rhs_q / (abs(lam) - 1.0) + float(tail.truncation_bound(lhs.window_end))
            trials += 1
            violations += lhs.value > rhs + 1e-12
    rt = time.perf_counter() - t0
    measured = f"{violations}/{trials} violations"
    return _report(10, "shift resolvent quotient bound", violations == 0, measured, rt)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run(selectors=None):
    """Run the selected criteria (all by default) and return their reports."""
    if selectors is None:
        ids = sorted(CRITERIA)
    else:
        ids = []
        for sel in selectors:
            cid = int(sel)
            if cid not in CRITERIA:
                raise KeyError(f"unknown criterion {sel}")
            ids.append(cid)
    return [CRITERIA[cid]() for cid in ids]


def format_report(report):
    status = "PASS" if report["passed"] else "FAIL"
    line = (
        f"[{status}] {report['id']:>2} {report['name']}: "
        f"{report['measured']} ({report['runtime']:.2f}s)"
    )
    if report.get("warning"):
        line += f" [warn: {report['warning']}]"
    return line
