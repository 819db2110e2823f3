"""Hot numeric loops: the Volterra recursion and the shift-resolvent tail sum.

Each kernel has a numba ``@njit`` implementation and a pure-numpy fallback;
``_backend.BACKEND`` decides which one the public wrappers dispatch to.  Both
variants must agree to rounding noise -- the benchmark and the test suite
compare them directly.
"""

import numpy as np
from scipy.signal import lfilter

from ._backend import HAVE_NUMBA


def _recursion_numpy(A, B, init, Y):
    """One-step-at-a-time Volterra recursion, vectorized convolution per step.

    A: (d, d), B: (N, d, d), init: (d, m), Y: (N, d, m).  Returns the
    (N+1, d, m) history and the first step index that produced a non-finite
    value (-1 if none).
    """
    N = Y.shape[0]
    d, m = init.shape
    out = np.zeros((N + 1, d, m), dtype=np.complex128)
    out[0] = init
    with np.errstate(over="ignore", invalid="ignore"):  # blow-up is reported via bad
        for n in range(N):
            past = out[: n + 1][::-1]  # x(n), x(n-1), ..., x(0)
            conv = np.einsum("kij,kjq->iq", B[: n + 1], past)
            nxt = A @ out[n] + conv + Y[n]
            out[n + 1] = nxt
            if not np.all(np.isfinite(nxt)):
                return out, n + 1
    return out, -1


def _shift_tail_numpy(x, lam):
    """Backward recursion U(k) = (x(k) + U(k+1)) / lam as a reverse-time IIR
    filter.  x: (L, d) complex, returns (L, d)."""
    w = 1.0 / lam
    rev = x[::-1].astype(np.complex128, copy=False)
    out = lfilter([w], [1.0, -w], rev, axis=0)
    return out[::-1]


if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _recursion_numba(A, B, init, Y):
        N = Y.shape[0]
        d = A.shape[0]
        m = init.shape[1]
        out = np.zeros((N + 1, d, m), dtype=np.complex128)
        out[0] = init
        for n in range(N):
            for i in range(d):
                for q in range(m):
                    acc = Y[n, i, q]
                    for j in range(d):
                        acc += A[i, j] * out[n, j, q]
                    for k in range(n + 1):
                        for j in range(d):
                            acc += B[k, i, j] * out[n - k, j, q]
                    out[n + 1, i, q] = acc
            ok = True
            for i in range(d):
                for q in range(m):
                    v = out[n + 1, i, q]
                    if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                        ok = False
            if not ok:
                return out, n + 1
        return out, -1

    @njit(cache=True)
    def _shift_tail_numba(x, lam):
        L, d = x.shape
        out = np.empty((L, d), dtype=np.complex128)
        w = 1.0 / lam
        prev = np.zeros(d, dtype=np.complex128)
        for k in range(L - 1, -1, -1):
            for j in range(d):
                u = w * (x[k, j] + prev[j])
                out[k, j] = u
                prev[j] = u
        return out


def run_recursion(A, B, init, Y, backend=None):
    """Dispatch the naive recursion to the selected backend."""
    use_numba = HAVE_NUMBA if backend is None else backend == "numba"
    if use_numba:
        return _recursion_numba(
            np.ascontiguousarray(A),
            np.ascontiguousarray(B),
            np.ascontiguousarray(init),
            np.ascontiguousarray(Y),
        )
    return _recursion_numpy(A, B, init, Y)


def shift_resolvent_tail(x, lam, backend=None):
    """Truncated tail sums U(k) = sum_{n=k}^{L-1} lam^{-(n-k)-1} x(n)."""
    use_numba = HAVE_NUMBA if backend is None else backend == "numba"
    if use_numba:
        return _shift_tail_numba(
            np.ascontiguousarray(x, dtype=np.complex128), complex(lam)
        )
    return _shift_tail_numpy(x, lam)


def _next_pow2(n):
    p = 1
    while p < n:
        p <<= 1
    return p


def run_recursion_fast(A, B, init, Y, base=32):
    """Divide-and-conquer online convolution variant of the recursion.

    Splits the step range in half, solves the left half, pushes its
    convolution contribution onto the right half with one FFT block product,
    and recurses; ranges at or below ``base`` fall back to direct stepping.
    Same contract as :func:`run_recursion`.
    """
    N = Y.shape[0]
    d, m = init.shape
    out = np.zeros((N + 1, d, m), dtype=np.complex128)
    out[0] = init
    acc = np.zeros((N, d, m), dtype=np.complex128)  # contributions from finished blocks
    bad = -1

    def block(lo, hi):
        nonlocal bad
        for n in range(lo, hi):
            seg = out[lo : n + 1][::-1]  # x(n), ..., x(lo)
            conv = np.einsum("kij,kjq->iq", B[: n - lo + 1], seg)
            nxt = A @ out[n] + acc[n] + conv + Y[n]
            out[n + 1] = nxt
            if not np.all(np.isfinite(nxt)):
                bad = n + 1
                return

    def rec(lo, hi):
        nonlocal bad
        if hi - lo <= base:
            block(lo, hi)
            return
        mid = (lo + hi) // 2
        rec(lo, mid)
        if bad >= 0:
            return
        L1 = mid - lo
        L2 = hi - lo
        nfft = _next_pow2(L1 + L2)
        FB = np.fft.fft(B[:L2], n=nfft, axis=0)
        Fu = np.fft.fft(out[lo:mid], n=nfft, axis=0)
        C = np.fft.ifft(np.einsum("tij,tjq->tiq", FB, Fu), axis=0)
        acc[mid:hi] += C[L1:L2]
        rec(mid, hi)

    if N > 0:
        with np.errstate(over="ignore", invalid="ignore"):
            rec(0, N)
    return out, bad


def warmup():
    """Trigger JIT compilation of the numba kernels on tiny inputs."""
    if not HAVE_NUMBA:
        return
    A = np.zeros((1, 1), dtype=np.complex128)
    B = np.zeros((2, 1, 1), dtype=np.complex128)
    init = np.ones((1, 1), dtype=np.complex128)
    Y = np.zeros((2, 1, 1), dtype=np.complex128)
    _recursion_numba(A, B, init, Y)
    _shift_tail_numba(np.ones((4, 1), dtype=np.complex128), 2.0 + 0.0j)
