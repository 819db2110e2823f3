"""Scenario files: a JSON description of one system + forcing + run.

Complex numbers are serialized as two-element [re, im] arrays so the
files stay language-neutral and lossless.  Trajectories go to CSV with
one row per index n and Re/Im columns per coordinate.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .model import (
    ConstantForcing,
    DecayingForcing,
    FiniteKernel,
    GeometricKernel,
    HarmonicForcing,
    TabulatedForcing,
    TabulatedKernel,
    VolterraSystem,
    ZeroForcing,
)

__all__ = [
    "ScenarioError",
    "Tolerances",
    "Scenario",
    "complex_to_pair",
    "pair_to_complex",
    "write_trajectory_csv",
    "read_trajectory_csv",
]


class ScenarioError(ValueError):
    """Schema violation; message names the offending field."""

    def __init__(self, message, where=""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


# JSON key -> attribute, with defaults per the shared tolerance block
_TOL_KEYS = {
    "singularTol": ("singular_tol", 1e-8),
    "rootCircleTol": ("root_circle_tol", 1e-8),
    "abelTol": ("abel_tol", 1e-2),
    "aapTol": ("aap_tol", 1e-3),
    "c0Tol": ("c0_tol", 1e-3),
    "slopeTol": ("slope_tol", 1e-3),
    "K0": ("K0", 1000),
    "window": ("window", 1000),
}


@dataclass
class Tolerances:
    singular_tol: float = 1e-8
    root_circle_tol: float = 1e-8
    abel_tol: float = 1e-2
    aap_tol: float = 1e-3
    c0_tol: float = 1e-3
    slope_tol: float = 1e-3
    K0: int = 1000
    window: int = 1000

    @classmethod
    def from_dict(cls, data):
        kwargs = {}
        for key, value in (data or {}).items():
            if key not in _TOL_KEYS:
                raise ScenarioError(f"unknown tolerance {key!r}", "tolerances")
            attr, default = _TOL_KEYS[key]
            kwargs[attr] = type(default)(value)
        return cls(**kwargs)

    def to_dict(self):
        out = {}
        for key, (attr, default) in _TOL_KEYS.items():
            value = getattr(self, attr)
            if value != default:
                out[key] = value
        return out

    def override(self, key, value):
        if key not in _TOL_KEYS:
            raise ScenarioError(f"unknown tolerance {key!r}", "--tol")
        attr, default = _TOL_KEYS[key]
        setattr(self, attr, type(default)(float(value)))


def pair_to_complex(pair, where=""):
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise ScenarioError(f"expected [re, im], got {pair!r}", where)
    return complex(float(pair[0]), float(pair[1]))


def complex_to_pair(z):
    z = complex(z)
    return [z.real, z.imag]


def _parse_vector(data, where):
    try:
        return np.array([pair_to_complex(p, where) for p in data], dtype=np.complex128)
    except ScenarioError:
        raise
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e), where)


def _parse_matrix(data, where):
    try:
        rows = [[pair_to_complex(p, where) for p in row] for row in data]
        return np.array(rows, dtype=np.complex128)
    except ScenarioError:
        raise
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e), where)


def _vector_to_json(v):
    return [complex_to_pair(z) for z in np.atleast_1d(v)]


def _matrix_to_json(M):
    return [[complex_to_pair(z) for z in row] for row in np.atleast_2d(M)]


def _parse_kernel(data, dim):
    if not isinstance(data, dict) or "type" not in data:
        raise ScenarioError("kernel must be an object with a 'type'", "kernel")
    kind = data["type"]
    try:
        if kind == "finite":
            terms = [_parse_matrix(t, "kernel.terms") for t in data.get("terms", [])]
            stack = (
                np.stack(terms)
                if terms
                else np.zeros((0, dim, dim), dtype=np.complex128)
            )
            return FiniteKernel(stack, dim=dim)
        if kind == "geometric-sum":
            coeffs = np.stack(
                [_parse_matrix(c, "kernel.coefficients") for c in data["coefficients"]]
            )
            ratios = _parse_vector(data["ratios"], "kernel.ratios")
            return GeometricKernel(coeffs, ratios)
        if kind == "tabulated":
            values = np.stack(
                [_parse_matrix(v, "kernel.values") for v in data["values"]]
            )
            return TabulatedKernel(values, float(data.get("tailNormBound", 0.0)))
    except ScenarioError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise ScenarioError(str(e), "kernel")
    raise ScenarioError(f"unknown kernel type {kind!r}", "kernel.type")


def _kernel_to_json(kernel):
    if isinstance(kernel, FiniteKernel):
        return {"type": "finite", "terms": [_matrix_to_json(t) for t in kernel.terms]}
    if isinstance(kernel, GeometricKernel):
        return {
            "type": "geometric-sum",
            "coefficients": [_matrix_to_json(c) for c in kernel.coefficients],
            "ratios": [complex_to_pair(r) for r in kernel.ratios],
        }
    if isinstance(kernel, TabulatedKernel):
        return {
            "type": "tabulated",
            "values": [_matrix_to_json(v) for v in kernel.values],
            "tailNormBound": kernel.tail_norm_bound,
        }
    raise ScenarioError(f"unserializable kernel {type(kernel).__name__}", "kernel")


def _parse_forcing(data, dim):
    if data is None:
        return ZeroForcing(dim)
    if not isinstance(data, dict) or "type" not in data:
        raise ScenarioError("forcing must be an object with a 'type'", "forcing")
    kind = data["type"]
    try:
        if kind == "zero":
            return ZeroForcing(dim)
        if kind == "constant":
            return ConstantForcing(_parse_vector(data["value"], "forcing.value"))
        if kind == "harmonic":
            angles = np.asarray(data["angles"], dtype=float)
            amps = np.stack(
                [_parse_vector(a, "forcing.amplitudes") for a in data["amplitudes"]]
            )
            return HarmonicForcing(angles, amps)
        if kind == "decaying":
            return DecayingForcing(
                _parse_vector(data["vector"], "forcing.vector"),
                ratio=pair_to_complex(data.get("ratio", 0.5), "forcing.ratio"),
                kind=data.get("kind", "geometric"),
            )
        if kind == "tabulated":
            values = np.stack(
                [_parse_vector(v, "forcing.values") for v in data["values"]]
            )
            return TabulatedForcing(values)
    except ScenarioError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise ScenarioError(str(e), "forcing")
    raise ScenarioError(f"unknown forcing type {kind!r}", "forcing.type")


def _forcing_to_json(forcing):
    if isinstance(forcing, ZeroForcing):
        return {"type": "zero"}
    if isinstance(forcing, ConstantForcing):
        return {"type": "constant", "value": _vector_to_json(forcing.value)}
    if isinstance(forcing, HarmonicForcing):
        return {
            "type": "harmonic",
            "angles": [float(a) for a in forcing.angles],
            "amplitudes": [_vector_to_json(a) for a in forcing.amplitudes],
        }
    if isinstance(forcing, DecayingForcing):
        return {
            "type": "decaying",
            "vector": _vector_to_json(forcing.vector),
            "ratio": complex_to_pair(forcing.ratio),
            "kind": forcing.kind,
        }
    if isinstance(forcing, TabulatedForcing):
        return {"type": "tabulated", "values": [_vector_to_json(v) for v in forcing.values]}
    raise ScenarioError(f"unserializable forcing {type(forcing).__name__}", "forcing")


@dataclass
class Scenario:
    system: VolterraSystem
    forcing: object
    x0: np.ndarray
    N: int
    tolerances: Tolerances = field(default_factory=Tolerances)
    name: str = ""

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ScenarioError("scenario must be a JSON object")
        for key in ("dim", "A", "N"):
            if key not in data:
                raise ScenarioError(f"missing required field {key!r}", key)
        dim = int(data["dim"])
        if dim < 1:
            raise ScenarioError("dim must be positive", "dim")
        A = _parse_matrix(data["A"], "A")
        if A.shape != (dim, dim):
            raise ScenarioError(f"A has shape {A.shape}, expected ({dim}, {dim})", "A")
        kernel = _parse_kernel(
            data.get("kernel", {"type": "finite", "terms": []}), dim
        )
        try:
            system = VolterraSystem(A, kernel, dim=dim)
        except ValueError as e:
            raise ScenarioError(str(e), "kernel")
        forcing = _parse_forcing(data.get("forcing"), dim)
        if forcing.dim != dim:
            raise ScenarioError(
                f"forcing dim {forcing.dim} != system dim {dim}", "forcing"
            )
        if "x0" in data:
            x0 = _parse_vector(data["x0"], "x0")
            if x0.shape != (dim,):
                raise ScenarioError(f"x0 has length {x0.shape[0]}, expected {dim}", "x0")
        else:
            x0 = np.zeros(dim, dtype=np.complex128)
        N = int(data["N"])
        if N < 0:
            raise ScenarioError("N must be nonnegative", "N")
        tolerances = Tolerances.from_dict(data.get("tolerances"))
        return cls(system, forcing, x0, N, tolerances, str(data.get("name", "")))

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"invalid JSON: {e}")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())

    def to_dict(self):
        out = {
            "dim": self.system.dim,
            "A": _matrix_to_json(self.system.A),
            "kernel": _kernel_to_json(self.system.kernel),
            "forcing": _forcing_to_json(self.forcing),
            "x0": _vector_to_json(self.x0),
            "N": self.N,
        }
        tol = self.tolerances.to_dict()
        if tol:
            out["tolerances"] = tol
        if self.name:
            out["name"] = self.name
        return out

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def write_trajectory_csv(path, values):
    """One row per n: n, re_x0, im_x0, re_x1, im_x1, ..."""
    values = np.asarray(values, dtype=np.complex128)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim == 3:  # operator trajectory, row-major entries
        values = values.reshape(values.shape[0], -1)
    d = values.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["n"]
        for j in range(d):
            header += [f"re_x{j}", f"im_x{j}"]
        writer.writerow(header)
        for n, row in enumerate(values):
            out = [n]
            for z in row:
                out += [repr(float(z.real)), repr(float(z.imag))]
            writer.writerow(out)


def read_trajectory_csv(path):
    """Inverse of write_trajectory_csv; returns an (N+1, d) complex array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = (len(header) - 1) // 2
        rows = []
        for row in reader:
            if not row:
                continue
            vals = [
                complex(float(row[1 + 2 * j]), float(row[2 + 2 * j])) for j in range(d)
            ]
            rows.append(vals)
    return np.array(rows, dtype=np.complex128)
