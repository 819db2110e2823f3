"""Domain types for Volterra systems: state matrix, memory kernels, forcings.

The state space is C^d with d small.  Operator norms are spectral norms
(largest singular value) throughout.  All types are treated as immutable
after construction.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PoleError",
    "as_complex_matrix",
    "as_complex_vector",
    "spectral_norm",
    "seq_norms",
    "FiniteKernel",
    "GeometricKernel",
    "TabulatedKernel",
    "ZeroForcing",
    "ConstantForcing",
    "HarmonicForcing",
    "DecayingForcing",
    "TabulatedForcing",
    "VolterraSystem",
    "kernel_eval",
    "kernel_norm_sum",
    "forcing_eval",
    "contraction_check",
]


class PoleError(ValueError):
    """Evaluation requested at (or too close to) a pole of a closed form."""


def as_complex_matrix(entries, dim=None):
    """Coerce to a finite (d, d) complex matrix.  Scalars become 1x1."""
    M = np.atleast_2d(np.asarray(entries, dtype=np.complex128))
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if dim is not None and M.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {M.shape[0]}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def as_complex_vector(entries, dim=None):
    v = np.atleast_1d(np.asarray(entries, dtype=np.complex128))
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def spectral_norm(M):
    """Largest singular value."""
    return float(np.linalg.norm(np.atleast_2d(M), 2))


def seq_norms(values):
    """Per-index norms of a sequence: Euclidean for vectors (L, d),
    spectral for matrices (L, d, d)."""
    values = np.asarray(values)
    if values.ndim == 2:
        return np.linalg.norm(values, axis=1)
    if values.ndim == 3:
        return np.linalg.svd(values, compute_uv=False)[:, 0]
    raise ValueError(f"expected (L, d) or (L, d, d), got shape {values.shape}")


# ---------------------------------------------------------------------------
# Kernels: B(n) with sum_n ||B(n)|| < infinity
# ---------------------------------------------------------------------------


@dataclass
class FiniteKernel:
    """B(n) = terms[n] for n < m, zero afterwards."""

    terms: np.ndarray  # (m, d, d)
    dim: int = 0

    def __post_init__(self):
        terms = np.asarray(self.terms, dtype=np.complex128)
        if terms.size == 0:
            if self.dim < 1:
                raise ValueError("empty kernel needs an explicit dim")
            terms = terms.reshape(0, self.dim, self.dim)
        else:
            if terms.ndim == 1:  # sequence of scalars
                terms = terms.reshape(-1, 1, 1)
            if terms.ndim != 3 or terms.shape[1] != terms.shape[2]:
                raise ValueError(f"expected (m, d, d) terms, got {terms.shape}")
        if not np.all(np.isfinite(terms)):
            raise ValueError("kernel terms must be finite")
        self.terms = terms
        self.dim = terms.shape[1]

    def eval(self, n):
        if n < self.terms.shape[0]:
            return self.terms[n].copy()
        return np.zeros((self.dim, self.dim), dtype=np.complex128)

    def eval_range(self, N):
        out = np.zeros((N, self.dim, self.dim), dtype=np.complex128)
        m = min(N, self.terms.shape[0])
        out[:m] = self.terms[:m]
        return out

    def norm_sum(self):
        if self.terms.shape[0] == 0:
            return 0.0
        return float(np.sum(np.linalg.svd(self.terms, compute_uv=False)[:, 0]))

    def zt(self, z):
        """Exact sum_{n<m} B(n) z^{-n}; defined for all z != 0 (all z if m <= 1)."""
        m = self.terms.shape[0]
        if m == 0:
            return np.zeros((self.dim, self.dim), dtype=np.complex128), 0.0
        if m > 1 and z == 0:
            raise PoleError("finite kernel transform has a pole at z=0")
        val = self.terms[m - 1].astype(np.complex128)
        for n in range(m - 2, -1, -1):  # Horner in 1/z
            val = val / z + self.terms[n]
        return val, 0.0

    def zt_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        m = self.terms.shape[0]
        out = np.zeros(zs.shape + (self.dim, self.dim), dtype=np.complex128)
        if m == 0:
            return out, 0.0
        if m > 1 and np.any(zs == 0):
            raise PoleError("finite kernel transform has a pole at z=0")
        out[...] = self.terms[m - 1]
        for n in range(m - 2, -1, -1):
            out = out / zs[..., None, None] + self.terms[n]
        return out, 0.0

    def rational_zt(self):
        """B~(z) = Q(z) / z^(m-1) as ascending coefficient stacks (Q, q)."""
        m = self.terms.shape[0]
        if m == 0:
            num = np.zeros((1, self.dim, self.dim), dtype=np.complex128)
            return num, np.array([1.0 + 0.0j])
        num = self.terms[::-1].copy()  # coeff of z^p is B(m-1-p)
        den = np.zeros(m, dtype=np.complex128)
        den[m - 1] = 1.0
        return num, den


@dataclass
class GeometricKernel:
    """B(n) = sum_j C_j r_j^n with every ratio strictly inside the unit disk."""

    coefficients: np.ndarray  # (J, d, d)
    ratios: np.ndarray  # (J,)

    def __post_init__(self):
        C = np.asarray(self.coefficients, dtype=np.complex128)
        if C.ndim == 1:
            C = C.reshape(-1, 1, 1)
        elif C.ndim == 2:
            C = C.reshape(1, *C.shape)
        if C.ndim != 3 or C.shape[1] != C.shape[2] or C.shape[0] < 1:
            raise ValueError(f"expected (J, d, d) coefficients, got {C.shape}")
        r = np.atleast_1d(np.asarray(self.ratios, dtype=np.complex128))
        if r.shape != (C.shape[0],):
            raise ValueError("one ratio per coefficient matrix required")
        if not np.all(np.isfinite(C)) or not np.all(np.isfinite(r)):
            raise ValueError("kernel parameters must be finite")
        if np.any(np.abs(r) >= 1.0):
            raise ValueError("geometric ratios must satisfy |r| < 1")
        self.coefficients = C
        self.ratios = r

    @property
    def dim(self):
        return self.coefficients.shape[1]

    def eval(self, n):
        w = self.ratios**n
        return np.einsum("j,jik->ik", w, self.coefficients)

    def eval_range(self, N):
        pw = self.ratios[:, None] ** np.arange(N)[None, :]  # (J, N)
        return np.einsum("jn,jik->nik", pw, self.coefficients)

    def norm_sum(self):
        norms = np.linalg.svd(self.coefficients, compute_uv=False)[:, 0]
        return float(np.sum(norms / (1.0 - np.abs(self.ratios))))

    def zt(self, z):
        """Closed form sum_j C_j z / (z - r_j); analytic off the ratios."""
        dz = z - self.ratios
        if np.any(np.abs(dz) < 1e-14 * (1.0 + abs(z))):
            raise PoleError(f"z={z} hits a kernel pole")
        w = z / dz
        return np.einsum("j,jik->ik", w, self.coefficients), 0.0

    def zt_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        dz = zs[..., None] - self.ratios
        if np.any(np.abs(dz) < 1e-14 * (1.0 + np.abs(zs[..., None]))):
            raise PoleError("evaluation grid hits a kernel pole")
        w = zs[..., None] / dz
        return np.einsum("...j,jik->...ik", w, self.coefficients), 0.0

    def rational_zt(self):
        """B~(z) = Q(z) / prod_j (z - r_j), ascending coefficients."""
        from numpy.polynomial import polynomial as P

        J = self.coefficients.shape[0]
        den = P.polyfromroots(self.ratios)  # degree J, ascending
        num = np.zeros((J + 1, self.dim, self.dim), dtype=np.complex128)
        for j in range(J):
            others = np.delete(self.ratios, j)
            pj = P.polyfromroots(others) if others.size else np.array([1.0 + 0.0j])
            pj = np.concatenate([[0.0], pj])  # multiply by z
            num[: pj.size] += pj[:, None, None] * self.coefficients[j]
        return num, den.astype(np.complex128)


@dataclass
class TabulatedKernel:
    """Stored B(0..N_k) plus a declared bound on the tail norm sum."""

    values: np.ndarray  # (N_k + 1, d, d)
    tail_norm_bound: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1, 1)
        if vals.ndim != 3 or vals.shape[1] != vals.shape[2] or vals.shape[0] < 1:
            raise ValueError(f"expected (N_k+1, d, d) values, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("kernel values must be finite")
        if self.tail_norm_bound < 0:
            raise ValueError("tail norm bound must be nonnegative")
        self.values = vals
        self.tail_norm_bound = float(self.tail_norm_bound)

    @property
    def dim(self):
        return self.values.shape[1]

    def eval(self, n):
        if n < self.values.shape[0]:
            return self.values[n].copy()
        return np.zeros((self.dim, self.dim), dtype=np.complex128)

    def eval_range(self, N):
        out = np.zeros((N, self.dim, self.dim), dtype=np.complex128)
        m = min(N, self.values.shape[0])
        out[:m] = self.values[:m]
        return out

    def norm_sum(self):
        stored = float(np.sum(np.linalg.svd(self.values, compute_uv=False)[:, 0]))
        return stored + self.tail_norm_bound

    def zt(self, z):
        """Truncated sum over the stored range; needs |z| >= 1 so the declared
        tail bound dominates the dropped terms."""
        if abs(z) < 1.0 - 1e-12:  # slack: |exp(i*theta)| rounds below 1
            raise ValueError("tabulated kernel transform needs |z| >= 1")
        K = self.values.shape[0]
        val = self.values[K - 1].astype(np.complex128)
        for n in range(K - 2, -1, -1):
            val = val / z + self.values[n]
        bound = self.tail_norm_bound * abs(z) ** (-K)
        return val, float(bound)

    def zt_many(self, zs):
        zs = np.asarray(zs, dtype=np.complex128)
        if np.any(np.abs(zs) < 1.0 - 1e-12):
            raise ValueError("tabulated kernel transform needs |z| >= 1")
        K = self.values.shape[0]
        out = np.zeros(zs.shape + (self.dim, self.dim), dtype=np.complex128)
        out[...] = self.values[K - 1]
        for n in range(K - 2, -1, -1):
            out = out / zs[..., None, None] + self.values[n]
        bound = self.tail_norm_bound * float(np.max(np.abs(zs)) ** (-K))
        return out, bound

    def rational_zt(self):
        return None  # no closed form; callers fall back to circle scanning


# ---------------------------------------------------------------------------
# Forcings: bounded sequences y(n)
# ---------------------------------------------------------------------------


@dataclass
class ZeroForcing:
    dim: int = 1

    def eval(self, n):
        return np.zeros(self.dim, dtype=np.complex128)

    def eval_range(self, N):
        return np.zeros((N, self.dim), dtype=np.complex128)

    def amplitude_bound(self):
        return 0.0


@dataclass
class ConstantForcing:
    value: np.ndarray

    def __post_init__(self):
        self.value = as_complex_vector(self.value)

    @property
    def dim(self):
        return self.value.shape[0]

    def eval(self, n):
        return self.value.copy()

    def eval_range(self, N):
        return np.tile(self.value, (N, 1))

    def amplitude_bound(self):
        return float(np.linalg.norm(self.value))


@dataclass
class HarmonicForcing:
    """y(n) = sum_j e^(i n theta_j) v_j."""

    angles: np.ndarray  # (J,)
    amplitudes: np.ndarray  # (J, d)

    def __post_init__(self):
        self.angles = np.atleast_1d(np.asarray(self.angles, dtype=float)) % (2 * np.pi)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim == 1:
            amps = amps.reshape(len(self.angles), -1)
        if amps.shape[0] != self.angles.shape[0]:
            raise ValueError("one amplitude vector per angle required")
        self.amplitudes = amps

    @property
    def dim(self):
        return self.amplitudes.shape[1]

    def eval(self, n):
        phases = np.exp(1j * n * self.angles)
        return phases @ self.amplitudes

    def eval_range(self, N):
        phases = np.exp(1j * np.outer(np.arange(N), self.angles))
        return phases @ self.amplitudes

    def amplitude_bound(self):
        return float(np.sum(np.linalg.norm(self.amplitudes, axis=1)))


@dataclass
class DecayingForcing:
    """A c0 forcing: v * ratio^n ('geometric') or v / (n+1) ('inverse-n')."""

    vector: np.ndarray
    ratio: complex = 0.5
    kind: str = "geometric"

    def __post_init__(self):
        self.vector = as_complex_vector(self.vector)
        self.ratio = complex(self.ratio)
        if self.kind not in ("geometric", "inverse-n"):
            raise ValueError(f"unknown decaying forcing kind {self.kind!r}")
        if self.kind == "geometric" and abs(self.ratio) >= 1.0:
            raise ValueError("geometric decay needs |ratio| < 1")

    @property
    def dim(self):
        return self.vector.shape[0]

    def eval(self, n):
        if self.kind == "geometric":
            return self.vector * self.ratio**n
        return self.vector / (n + 1.0)

    def eval_range(self, N):
        n = np.arange(N)
        if self.kind == "geometric":
            return self.ratio**n[:, None] * self.vector
        return self.vector / (n[:, None] + 1.0)

    def amplitude_bound(self):
        return float(np.linalg.norm(self.vector))


@dataclass
class TabulatedForcing:
    """Stored values, zero-extended past the stored range."""

    values: np.ndarray  # (L, d)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)
        if vals.ndim != 2:
            raise ValueError(f"expected (L, d) values, got {vals.shape}")
        self.values = vals

    @property
    def dim(self):
        return self.values.shape[1]

    def eval(self, n):
        if n < self.values.shape[0]:
            return self.values[n].copy()
        return np.zeros(self.dim, dtype=np.complex128)

    def eval_range(self, N):
        out = np.zeros((N, self.dim), dtype=np.complex128)
        m = min(N, self.values.shape[0])
        out[:m] = self.values[:m]
        return out

    def amplitude_bound(self):
        if self.values.shape[0] == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.values, axis=1)))


# ---------------------------------------------------------------------------
# The system x(n+1) = A x(n) + sum_{k<=n} B(n-k) x(k) + y(n)
# ---------------------------------------------------------------------------


@dataclass
class VolterraSystem:
    A: np.ndarray
    kernel: object
    dim: int = 0

    def __post_init__(self):
        self.A = as_complex_matrix(self.A)
        d = self.A.shape[0]
        if self.kernel.dim != d:
            raise ValueError(
                f"kernel dimension {self.kernel.dim} != state dimension {d}"
            )
        if self.dim and self.dim != d:
            raise ValueError(f"declared dim {self.dim} != matrix dim {d}")
        self.dim = d


def kernel_eval(kernel, n, strict=False):
    """B(n).  In strict mode a tabulated kernel refuses to extrapolate past
    its stored range while its tail bound is positive."""
    if n < 0:
        raise ValueError("kernel index must be nonnegative")
    if (
        strict
        and isinstance(kernel, TabulatedKernel)
        and n >= kernel.values.shape[0]
        and kernel.tail_norm_bound > 0
    ):
        raise ValueError(
            f"strict mode: B({n}) beyond stored range with nonzero tail bound"
        )
    return kernel.eval(n)


def kernel_norm_sum(kernel):
    """Upper bound on sum_n ||B(n)|| in spectral norm."""
    return kernel.norm_sum()


def forcing_eval(forcing, n):
    if n < 0:
        raise ValueError("forcing index must be nonnegative")
    return forcing.eval(n)


def contraction_check(system):
    """Whether ||A|| + sum_n ||B(n)|| <= 1, and the slack 1 - that sum."""
    total = spectral_norm(system.A) + kernel_norm_sum(system.kernel)
    return total <= 1.0, 1.0 - total
