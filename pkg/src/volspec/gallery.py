"""Built-in example systems.

The main gallery holds ten contraction systems (norm budget under 0.9,
so the contraction slack exceeds 0.1) across dimensions 1..3 and all
three kernel variants.  Each ships with a single-mode harmonic forcing;
analysis code swaps in other forcings as needed.  Two classical scalar
systems used throughout the docs and tests are exposed separately.
"""

import numpy as np

from .model import (
    DecayingForcing,
    FiniteKernel,
    GeometricKernel,
    HarmonicForcing,
    TabulatedKernel,
    VolterraSystem,
    ZeroForcing,
)
from .scenario import Scenario, Tolerances

__all__ = [
    "kt_system",
    "cor3_system",
    "gallery",
    "with_forcing",
]


def kt_system():
    """Scalar a=0.5 with kernel B(n) = 0.25 * 0.5^n.

    The characteristic polynomial (z-1)(z-0.25) puts the single singular
    point at z=1; the resolvent converges to 2/3 without decaying."""
    return VolterraSystem(
        np.array([[0.5]]), GeometricKernel(np.array([[[0.25]]]), np.array([0.5]))
    )


def cor3_system():
    """Scalar a=0.5 with kernel B(n) = 0.125 * 0.5^n.

    Both characteristic roots sit inside the disk (0.82019..., 0.30480...),
    the singular set is empty and the resolvent decays geometrically."""
    return VolterraSystem(
        np.array([[0.5]]), GeometricKernel(np.array([[[0.125]]]), np.array([0.5]))
    )


def _rot(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _tabulated_geometric(scale, ratio, length, dim=1, mix=None):
    """Tabulate scale * ratio^n (times an optional matrix) with the exact
    geometric tail bound for the dropped terms."""
    M = np.eye(dim, dtype=np.complex128) if mix is None else np.asarray(mix)
    vals = np.array([scale * ratio**n * M for n in range(length)])
    mnorm = float(np.linalg.norm(M, 2))
    tail = scale * mnorm * abs(ratio) ** length / (1.0 - abs(ratio))
    return TabulatedKernel(vals, tail)


def gallery():
    """Ten contraction scenarios (slack > 0.1), horizon 2000."""
    entries = []

    def add(name, A, kernel, angle, amp=None):
        A = np.atleast_2d(np.asarray(A, dtype=np.complex128))
        system = VolterraSystem(A, kernel)
        d = system.dim
        if amp is None:
            amp = np.ones(d, dtype=np.complex128) / np.sqrt(d)
        forcing = HarmonicForcing(np.array([angle]), amp.reshape(1, d))
        x0 = np.full(d, 0.5, dtype=np.complex128)
        entries.append(
            Scenario(system, forcing, x0, 2000, Tolerances(), name=name)
        )

    add(
        "g01-scalar-geometric",
        [[0.3]],
        GeometricKernel(np.array([[[0.2]]]), np.array([0.5])),
        0.7,
    )
    add(
        "g02-scalar-finite",
        [[0.4]],
        FiniteKernel(np.array([[[0.2]], [[0.1]]])),
        1.9,
    )
    add(
        "g03-scalar-alternating",
        [[-0.35]],
        GeometricKernel(np.array([[[0.15]]]), np.array([-0.4])),
        2.6,
    )
    add(
        "g04-scalar-complex",
        [[0.25 + 0.2j]],
        FiniteKernel(np.array([[[0.1j]], [[0.15]]])),
        np.pi / 2,
    )
    add(
        "g05-2d-triangular",
        [[0.2, 0.1], [0.0, 0.25]],
        GeometricKernel(np.array([0.1 * np.eye(2)]), np.array([0.3])),
        0.4,
    )
    add(
        "g06-2d-rotation",
        0.35 * _rot(1.0),
        FiniteKernel(np.array([0.15 * np.array([[0.0, 1.0], [1.0, 0.0]])])),
        2.2,
    )
    add(
        "g07-2d-complex",
        [[0.15 + 0.1j, 0.05], [-0.05, 0.2 - 0.1j]],
        GeometricKernel(
            np.array([0.08 * np.eye(2), 0.06 * np.array([[0, 1], [1, 0]])]),
            np.array([0.5, -0.3]),
        ),
        5.0,
    )
    add(
        "g08-scalar-tabulated",
        [[0.2]],
        _tabulated_geometric(0.3, 0.5, 21),
        1.1,
    )
    add(
        "g09-2d-tabulated",
        0.3 * np.eye(2),
        _tabulated_geometric(0.12, 0.4, 16, dim=2, mix=[[1.0, 0.5], [0.0, 1.0]]),
        3.6,
    )
    A10 = np.diag([0.2, 0.25, 0.15]).astype(np.complex128)
    A10[0, 1] = A10[1, 2] = 0.05
    add(
        "g10-3d-geometric",
        A10,
        GeometricKernel(np.array([0.1 * np.eye(3)]), np.array([0.6])),
        0.9,
    )
    return entries


def with_forcing(scenario, forcing, N=None):
    """Copy of a scenario with the forcing (and optionally horizon) swapped."""
    return Scenario(
        scenario.system,
        forcing,
        scenario.x0,
        scenario.N if N is None else N,
        scenario.tolerances,
        name=scenario.name,
    )


def decaying_variant(scenario, inverse=False):
    """Decaying-forcing counterpart used by the stability checks."""
    d = scenario.system.dim
    if inverse:
        vec = np.full(d, 0.1, dtype=np.complex128)
        forcing = DecayingForcing(vec, kind="inverse-n")
    else:
        vec = np.full(d, 0.5, dtype=np.complex128)
        forcing = DecayingForcing(vec, ratio=0.8)
    return with_forcing(scenario, forcing)


def zero_variant(scenario):
    return with_forcing(scenario, ZeroForcing(scenario.system.dim))
