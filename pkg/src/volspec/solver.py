"""Forward simulation of x(n+1) = A x(n) + (B*x)(n) + y(n).

Two engines: a naive O(N^2 d^2) stepper and an FFT divide-and-conquer
path that is exact up to roundoff.  Both abort with the offending step
index when values stop being finite; unstable systems are expected to
blow up and the caller gets honest data up to that point.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import VolterraSystem, ZeroForcing, as_complex_vector, seq_norms

__all__ = [
    "SolverOverflow",
    "Trajectory",
    "OperatorTrajectory",
    "solve",
    "solve_fast",
    "resolvent",
    "apply_V",
    "representation_check",
]


class SolverOverflow(OverflowError):
    """Non-finite value appeared during the recursion."""

    def __init__(self, step):
        super().__init__(f"non-finite state at step {step}")
        self.step = step


@dataclass
class Trajectory:
    """x(0..N) as rows of a (N+1, d) array."""

    values: np.ndarray
    system: VolterraSystem = None
    forcing: object = None

    def __len__(self):
        return self.values.shape[0]

    def norms(self):
        return seq_norms(self.values)

    def sup_norm(self):
        return float(np.max(self.norms()))


@dataclass
class OperatorTrajectory:
    """X(0..N) as a (N+1, d, d) stack; X(0) is the identity."""

    values: np.ndarray
    system: VolterraSystem = None

    def __len__(self):
        return self.values.shape[0]

    def norms(self):
        return seq_norms(self.values)

    def sup_norm(self):
        return float(np.max(self.norms()))


def _materialize(system, forcing, N, columns):
    B = system.kernel.eval_range(max(N, 1))
    if forcing is None:
        Y = np.zeros((max(N, 1), system.dim, columns), dtype=np.complex128)
    else:
        if forcing.dim != system.dim:
            raise ValueError("forcing dimension does not match the system")
        Y = forcing.eval_range(max(N, 1)).reshape(max(N, 1), system.dim, 1)
    return B, Y


def solve(system, forcing, x0, N, backend=None):
    """Run the recursion for N steps from x(0)=x0."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    x0 = as_complex_vector(x0, dim=system.dim)
    B, Y = _materialize(system, forcing, N, 1)
    out, bad = _kernels.run_recursion(
        system.A, B, x0.reshape(-1, 1), Y, backend=backend
    )
    if 0 <= bad <= N:
        raise SolverOverflow(bad)
    return Trajectory(out[: N + 1, :, 0], system=system, forcing=forcing)


def solve_fast(system, forcing, x0, N):
    """Same trajectory as solve via divide-and-conquer FFT convolution."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    x0 = as_complex_vector(x0, dim=system.dim)
    B, Y = _materialize(system, forcing, N, 1)
    out, bad = _kernels.run_recursion_fast(system.A, B, x0.reshape(-1, 1), Y)
    if 0 <= bad <= N:
        raise SolverOverflow(bad)
    return Trajectory(out[: N + 1, :, 0], system=system, forcing=forcing)


def resolvent(system, N, backend=None, fast=False):
    """The operator sequence X(0)=I, X(n+1) = A X(n) + sum_j B(n-j) X(j)."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    d = system.dim
    B = system.kernel.eval_range(max(N, 1))
    Y = np.zeros((max(N, 1), d, d), dtype=np.complex128)
    eye = np.eye(d, dtype=np.complex128)
    runner = _kernels.run_recursion_fast if fast else _kernels.run_recursion
    kwargs = {} if fast else {"backend": backend}
    out, bad = runner(system.A, B, eye, Y, **kwargs)
    if 0 <= bad <= N:
        raise SolverOverflow(bad)
    return OperatorTrajectory(out[: N + 1], system=system)


def _conv_full(B, x):
    """(B*x)(n) = sum_{k<=n} B(k) x(n-k) for n < len(x), via one FFT pass.

    B is (L, d, d); x is (L, d) or (L, d, m)."""
    L = x.shape[0]
    nfft = 1
    while nfft < 2 * L:
        nfft *= 2
    FB = np.fft.fft(B[:L], n=nfft, axis=0)
    squeeze = x.ndim == 2
    xm = x[:, :, None] if squeeze else x
    Fx = np.fft.fft(xm, n=nfft, axis=0)
    C = np.fft.ifft(np.einsum("tij,tjq->tiq", FB, Fx), axis=0)[:L]
    return C[:, :, 0] if squeeze else C


def apply_V(system, values):
    """(V x)(n) = A x(n) + sum_{k<=n} B(k) x(n-k) over a window x(0..N)."""
    x = np.asarray(values, dtype=np.complex128)
    squeeze = False
    if x.ndim == 1:
        x = x.reshape(-1, 1)
        squeeze = True
    if x.shape[1] != system.dim:
        raise ValueError("sequence dimension does not match the system")
    B = system.kernel.eval_range(x.shape[0])
    out = x @ system.A.T + _conv_full(B, x)
    return out[:, 0] if squeeze else out


def representation_check(system, x0, N):
    """max_n ||solve(.., zero forcing, x0)(n) - X(n) x0||; small by linearity."""
    x0 = as_complex_vector(x0, dim=system.dim)
    traj = solve(system, ZeroForcing(system.dim), x0, N)
    R = resolvent(system, N)
    residual = traj.values - R.values @ x0
    return float(np.max(np.linalg.norm(residual, axis=1)))


def forced_representation_check(system, forcing, x0, N):
    """max residual of x(n) = X(n)x0 + sum_{k<n} X(n-1-k) y(k)."""
    x0 = as_complex_vector(x0, dim=system.dim)
    traj = solve(system, forcing, x0, N)
    R = resolvent(system, N)
    y = forcing.eval_range(N + 1)
    conv = _conv_full(R.values, y)
    z = R.values @ x0
    z[1:] += conv[:N]
    residual = traj.values - z
    return float(np.max(np.linalg.norm(residual, axis=1)))
